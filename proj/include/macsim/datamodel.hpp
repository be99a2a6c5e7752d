#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace macsim {

enum class Mode { original, extended };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

/// Cell marker for a comparison where either raw value is missing.
inline constexpr double kMissing = -1.0;

inline bool is_missing_cell(double cell) { return cell < 0.0; }

/// Metadata for one numeric-coded linking variable.
struct VariableSpec {
  std::string name;
  double t_range = 1.0;     // max - min of the declared value domain
  double tolerance = 0.0;   // largest difference still accepted as agreement
  std::optional<double> missing_sentinel;

  bool is_missing(double raw) const;
  /// Throws ConfigError unless t_range > 0 and 0 <= tolerance < t_range / 2.
  void validate() const;
};

/// Records stored column-major; NaN marks a missing value.
class RecordTable {
 public:
  RecordTable() = default;
  RecordTable(std::string id_column, std::vector<std::string> columns);

  const std::string& id_column() const { return id_column_; }
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t size() const { return ids_.size(); }
  std::size_t column_count() const { return columns_.size(); }

  /// Throws ConfigError for an unknown name.
  std::size_t column_index(std::string_view name) const;
  std::optional<std::size_t> find_column(std::string_view name) const;

  const std::string& id(std::size_t row) const { return ids_[row]; }
  const std::vector<std::string>& ids() const { return ids_; }
  double value(std::size_t row, std::size_t col) const { return data_[col][row]; }
  void set_value(std::size_t row, std::size_t col, double v) { data_[col][row] = v; }
  std::span<const double> column(std::size_t col) const { return data_[col]; }

  void add_record(std::string id, std::span<const double> values);
  void reserve(std::size_t n);

  /// New table holding the given rows in the given order.
  RecordTable select_rows(std::span<const std::size_t> rows) const;

  /// Throws AlignmentError on duplicate entity ids.
  void validate_unique_ids() const;

  friend bool operator==(const RecordTable& a, const RecordTable& b);

 private:
  std::string id_column_ = "RECID";
  std::vector<std::string> columns_;
  std::vector<std::string> ids_;
  std::vector<std::vector<double>> data_;
};

/// File X, file Y and, for each X record, the Y index of its true match.
struct AlignedPair {
  RecordTable file_x;
  RecordTable file_y;
  std::vector<std::size_t> alignment;

  bool is_canonical() const;
};

/// Builds the alignment by matching entity ids. Throws AlignmentError when an
/// X id is absent from Y or ids repeat.
AlignedPair align_by_id(RecordTable x, RecordTable y);

/// Builds the alignment from explicit (x id, y id) pairs.
AlignedPair align_by_map(RecordTable x, RecordTable y,
                         std::span<const std::pair<std::string, std::string>> pairs);

/// Reorders Y so the true match of X record i sits at Y index i; the
/// remaining Y records follow in their original order.
AlignedPair canonicalize_alignment(const AlignedPair& pair);

/// Dense (R_X, R_Y, L) array of similarity values in [0,1] or kMissing.
/// Stored variable-major then X-row-major so one (i, l) row over j is
/// contiguous.
class AgreementMatrix {
 public:
  AgreementMatrix() = default;
  AgreementMatrix(std::size_t rows_x, std::size_t rows_y, std::size_t variables, Mode mode,
                  double fill = kMissing);

  std::size_t rows_x() const { return rows_x_; }
  std::size_t rows_y() const { return rows_y_; }
  std::size_t variables() const { return variables_; }
  std::size_t cell_count() const { return cells_.size(); }
  Mode mode() const { return mode_; }

  double operator()(std::size_t i, std::size_t j, std::size_t l) const {
    return cells_[offset(i, j, l)];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t l) {
    return cells_[offset(i, j, l)];
  }

  std::span<double> row(std::size_t l, std::size_t i) {
    return {cells_.data() + offset(i, 0, l), rows_y_};
  }
  std::span<const double> row(std::size_t l, std::size_t i) const {
    return {cells_.data() + offset(i, 0, l), rows_y_};
  }
  std::span<const double> cells() const { return cells_; }
  std::span<double> cells() { return cells_; }

  bool same_shape(const AgreementMatrix& other) const;
  /// Throws DomainError if a cell violates the mode's value set.
  void validate() const;

  friend bool operator==(const AgreementMatrix&, const AgreementMatrix&) = default;

 private:
  std::size_t offset(std::size_t i, std::size_t j, std::size_t l) const {
    return (l * rows_x_ + i) * rows_y_ + j;
  }

  std::size_t rows_x_ = 0;
  std::size_t rows_y_ = 0;
  std::size_t variables_ = 0;
  Mode mode_ = Mode::extended;
  std::vector<double> cells_;
};

struct VariableMug {
  double m = 0.0;
  double u = 0.0;
  double g = 0.0;

  friend bool operator==(const VariableMug&, const VariableMug&) = default;
};

/// Per-variable agreement probabilities for matches (m), non-matches (u) and
/// missing comparisons (g).
struct MugProfile {
  std::vector<VariableMug> variables;

  std::size_t size() const { return variables.size(); }
  const VariableMug& operator[](std::size_t l) const { return variables[l]; }
  void validate() const;

  friend bool operator==(const MugProfile&, const MugProfile&) = default;
};

struct VariableTransition {
  double p1 = 0.0;
  double p2 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 1.0;
};

struct TransitionParams {
  std::vector<VariableTransition> variables;

  std::size_t size() const { return variables.size(); }
  const VariableTransition& operator[](std::size_t l) const { return variables[l]; }
  void validate() const;
};

struct Link {
  std::size_t x = 0;
  std::size_t y = 0;
  double weight = 0.0;

  friend bool operator==(const Link&, const Link&) = default;
};

/// A 1-1 partial mapping from X rows to Y rows.
class LinkSet {
 public:
  static constexpr std::size_t kUnlinked = std::numeric_limits<std::size_t>::max();

  LinkSet() = default;
  LinkSet(std::size_t rows_x, std::size_t rows_y)
      : partner_(rows_x, kUnlinked), y_partner_(rows_y, kUnlinked) {}

  /// Throws DomainError if either endpoint is already linked.
  void add(std::size_t x, std::size_t y, double weight);

  std::size_t rows_x() const { return partner_.size(); }
  std::size_t rows_y() const { return y_partner_.size(); }
  const std::vector<Link>& links() const { return links_; }
  std::size_t partner(std::size_t x) const { return partner_[x]; }
  bool is_linked(std::size_t x) const { return partner_[x] != kUnlinked; }
  bool is_y_linked(std::size_t y) const { return y_partner_[y] != kUnlinked; }
  std::vector<std::size_t> unlinked_x() const;

  friend bool operator==(const LinkSet& a, const LinkSet& b) {
    return a.links_ == b.links_ && a.partner_ == b.partner_;
  }

 private:
  std::vector<Link> links_;
  std::vector<std::size_t> partner_;
  std::vector<std::size_t> y_partner_;
};

}  // namespace macsim
