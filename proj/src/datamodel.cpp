#include "macsim/datamodel.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "macsim/error.hpp"

namespace macsim {

std::string_view to_string(Mode mode) {
  return mode == Mode::original ? "original" : "extended";
}

Mode parse_mode(std::string_view text) {
  if (text == "original") return Mode::original;
  if (text == "extended") return Mode::extended;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected original|extended)");
}

bool VariableSpec::is_missing(double raw) const {
  return std::isnan(raw) || (missing_sentinel && raw == *missing_sentinel);
}

void VariableSpec::validate() const {
  if (!(t_range > 0.0) || !std::isfinite(t_range)) {
    throw ConfigError("variable '" + name + "': range must be a positive finite number");
  }
  if (!(tolerance >= 0.0) || !(tolerance < t_range / 2.0)) {
    throw ConfigError("variable '" + name + "': tolerance must satisfy 0 <= tolerance < range/2");
  }
}

RecordTable::RecordTable(std::string id_column, std::vector<std::string> columns)
    : id_column_(std::move(id_column)),
      columns_(std::move(columns)),
      data_(columns_.size()) {}

std::optional<std::size_t> RecordTable::find_column(std::string_view name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns_.begin());
}

std::size_t RecordTable::column_index(std::string_view name) const {
  if (auto idx = find_column(name)) return *idx;
  throw ConfigError("unknown variable '" + std::string(name) + "'");
}

void RecordTable::add_record(std::string id, std::span<const double> values) {
  if (values.size() != columns_.size()) {
    throw ConfigError("record '" + id + "' has " + std::to_string(values.size()) +
                      " values, expected " + std::to_string(columns_.size()));
  }
  ids_.push_back(std::move(id));
  for (std::size_t c = 0; c < values.size(); ++c) data_[c].push_back(values[c]);
}

void RecordTable::reserve(std::size_t n) {
  ids_.reserve(n);
  for (auto& col : data_) col.reserve(n);
}

RecordTable RecordTable::select_rows(std::span<const std::size_t> rows) const {
  RecordTable out(id_column_, columns_);
  out.reserve(rows.size());
  for (std::size_t r : rows) out.ids_.push_back(ids_.at(r));
  for (std::size_t c = 0; c < data_.size(); ++c) {
    for (std::size_t r : rows) out.data_[c].push_back(data_[c][r]);
  }
  return out;
}

void RecordTable::validate_unique_ids() const {
  std::unordered_set<std::string_view> seen;
  seen.reserve(ids_.size());
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw AlignmentError("duplicate entity id '" + id + "'");
  }
}

bool operator==(const RecordTable& a, const RecordTable& b) {
  if (a.id_column_ != b.id_column_ || a.columns_ != b.columns_ || a.ids_ != b.ids_) return false;
  for (std::size_t c = 0; c < a.data_.size(); ++c) {
    const auto& ca = a.data_[c];
    const auto& cb = b.data_[c];
    for (std::size_t r = 0; r < ca.size(); ++r) {
      const bool both_nan = std::isnan(ca[r]) && std::isnan(cb[r]);
      if (!both_nan && ca[r] != cb[r]) return false;
    }
  }
  return true;
}

bool AlignedPair::is_canonical() const {
  for (std::size_t i = 0; i < alignment.size(); ++i) {
    if (alignment[i] != i) return false;
  }
  return true;
}

namespace {

std::unordered_map<std::string_view, std::size_t> index_ids(const RecordTable& t) {
  std::unordered_map<std::string_view, std::size_t> idx;
  idx.reserve(t.size());
  for (std::size_t r = 0; r < t.size(); ++r) idx.emplace(t.id(r), r);
  return idx;
}

}  // namespace

AlignedPair align_by_id(RecordTable x, RecordTable y) {
  x.validate_unique_ids();
  y.validate_unique_ids();
  const auto y_index = index_ids(y);
  std::vector<std::size_t> alignment(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto it = y_index.find(x.id(i));
    if (it == y_index.end()) {
      throw AlignmentError("X record '" + x.id(i) + "' has no true match in Y");
    }
    alignment[i] = it->second;
  }
  return {std::move(x), std::move(y), std::move(alignment)};
}

AlignedPair align_by_map(RecordTable x, RecordTable y,
                         std::span<const std::pair<std::string, std::string>> pairs) {
  x.validate_unique_ids();
  y.validate_unique_ids();
  const auto y_index = index_ids(y);
  std::unordered_map<std::string_view, std::string_view> partner;
  for (const auto& [xid, yid] : pairs) {
    if (!partner.emplace(xid, yid).second) {
      throw AlignmentError("X record '" + xid + "' aligned more than once");
    }
  }
  std::vector<std::size_t> alignment(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto p = partner.find(x.id(i));
    if (p == partner.end()) throw AlignmentError("X record '" + x.id(i) + "' has no alignment row");
    const auto it = y_index.find(p->second);
    if (it == y_index.end()) {
      throw AlignmentError("X record '" + x.id(i) + "' aligned to unknown Y record '" +
                           std::string(p->second) + "'");
    }
    alignment[i] = it->second;
  }
  return {std::move(x), std::move(y), std::move(alignment)};
}

AlignedPair canonicalize_alignment(const AlignedPair& pair) {
  const std::size_t nx = pair.file_x.size();
  const std::size_t ny = pair.file_y.size();
  if (pair.alignment.size() != nx) {
    throw AlignmentError("alignment has " + std::to_string(pair.alignment.size()) +
                         " entries for " + std::to_string(nx) + " X records");
  }
  std::vector<char> taken(ny, 0);
  std::vector<std::size_t> order;
  order.reserve(ny);
  for (std::size_t i = 0; i < nx; ++i) {
    const std::size_t j = pair.alignment[i];
    if (j >= ny) throw AlignmentError("X record '" + pair.file_x.id(i) + "' has no true match in Y");
    if (taken[j]) {
      throw AlignmentError("Y record '" + pair.file_y.id(j) + "' is the match of two X records");
    }
    taken[j] = 1;
    order.push_back(j);
  }
  for (std::size_t j = 0; j < ny; ++j) {
    if (!taken[j]) order.push_back(j);
  }
  AlignedPair out;
  out.file_x = pair.file_x;
  out.file_y = pair.file_y.select_rows(order);
  out.alignment.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) out.alignment[i] = i;
  return out;
}

AgreementMatrix::AgreementMatrix(std::size_t rows_x, std::size_t rows_y, std::size_t variables,
                                 Mode mode, double fill)
    : rows_x_(rows_x),
      rows_y_(rows_y),
      variables_(variables),
      mode_(mode),
      cells_(rows_x * rows_y * variables, fill) {}

bool AgreementMatrix::same_shape(const AgreementMatrix& other) const {
  return rows_x_ == other.rows_x_ && rows_y_ == other.rows_y_ && variables_ == other.variables_;
}

void AgreementMatrix::validate() const {
  for (double c : cells_) {
    if (c == kMissing) continue;
    const bool ok = mode_ == Mode::original ? (c == 0.0 || c == 1.0) : (c >= 0.0 && c <= 1.0);
    if (!ok) throw DomainError("agreement cell out of range for " + std::string(to_string(mode_)) +
                               " mode: " + std::to_string(c));
  }
}

void MugProfile::validate() const {
  for (std::size_t l = 0; l < variables.size(); ++l) {
    const auto& v = variables[l];
    const bool in_range = v.m >= 0 && v.m <= 1 && v.u >= 0 && v.u <= 1 && v.g >= 0 && v.g <= 1;
    if (!in_range || v.m + v.g > 1.0 || v.u + v.g > 1.0) {
      throw DomainError("m/u/g of variable " + std::to_string(l) + " are not valid probabilities");
    }
  }
}

void TransitionParams::validate() const {
  for (const auto& t : variables) {
    for (double p : {t.p1, t.p2, t.q1, t.q2, t.q3}) {
      if (!(p >= 0.0 && p <= 1.0)) throw DomainError("transition probability outside [0,1]");
    }
    if (t.q3 != 1.0) throw DomainError("q3 must be 1");
  }
}

void LinkSet::add(std::size_t x, std::size_t y, double weight) {
  if (x >= partner_.size() || y >= y_partner_.size()) throw DomainError("link index out of range");
  if (partner_[x] != kUnlinked || y_partner_[y] != kUnlinked) {
    throw DomainError("link would break the 1-1 constraint");
  }
  partner_[x] = y;
  y_partner_[y] = x;
  links_.push_back({x, y, weight});
}

std::vector<std::size_t> LinkSet::unlinked_x() const {
  std::vector<std::size_t> out;
  for (std::size_t x = 0; x < partner_.size(); ++x) {
    if (partner_[x] == kUnlinked) out.push_back(x);
  }
  return out;
}

}  // namespace macsim
