#include "macsim/kernels.hpp"

#include <cmath>

#include "macsim/datamodel.hpp"

namespace macsim::kernels {

std::uint64_t flip_threshold(double probability) {
  if (!(probability > 0.0)) return 0;
  if (probability >= 1.0) return std::uint64_t{1} << 32;
  return static_cast<std::uint64_t>(std::ldexp(probability, 32));
}

namespace scalar {
namespace {

void similarity_row(double x, const double* y, std::size_t n, double t_range, bool exact,
                    double* out) {
  if (std::isnan(x)) {
    for (std::size_t j = 0; j < n; ++j) out[j] = kMissing;
    return;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double yj = y[j];
    if (std::isnan(yj)) {
      out[j] = kMissing;
    } else if (exact) {
      out[j] = x == yj ? 1.0 : 0.0;
    } else {
      const double v = 1.0 - std::fabs(x - yj) / t_range;
      out[j] = v > 0.0 ? v : 0.0;
    }
  }
}

void update_range(double* row, std::size_t begin, std::size_t end, const RowRule& rule,
                  std::size_t& changed) {
  for (std::size_t j = begin; j < end; ++j) {
    const double v = row[j];
    if (v < 0.0) continue;
    bool flip;
    if (v >= rule.theta) {
      flip = rule.force_agreeing;
    } else {
      flip = cell_hash(rule.key, static_cast<std::uint32_t>(j)) < rule.flip_threshold;
    }
    if (flip) {
      row[j] = 1.0 - v;
      ++changed;
    }
  }
}

std::size_t row_update(double* row, std::size_t n, const RowRule& rule) {
  std::size_t changed = 0;
  const std::size_t skip = rule.skip < n ? rule.skip : n;
  update_range(row, 0, skip, rule, changed);
  if (skip < n) update_range(row, skip + 1, n, rule, changed);
  return changed;
}

void accumulate_weights(const double* row, std::size_t n, double theta, double w_agree,
                        double w_disagree, double* acc) {
  for (std::size_t j = 0; j < n; ++j) {
    const double v = row[j];
    const double w = v < 0.0 ? 0.0 : (v >= theta ? w_agree : w_disagree);
    acc[j] += w;
  }
}

std::size_t count_changed(const double* a, const double* b, std::size_t n) {
  std::size_t changed = 0;
  for (std::size_t k = 0; k < n; ++k) changed += a[k] != b[k];
  return changed;
}

ClassCounts count_classes(const double* row, std::size_t n, double theta) {
  ClassCounts c;
  for (std::size_t j = 0; j < n; ++j) {
    c.missing += row[j] < 0.0;
    c.agree += row[j] >= theta;
  }
  return c;
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{"scalar",        similarity_row, row_update,
                             accumulate_weights, count_changed, count_classes};
  return t;
}

}  // namespace scalar
}  // namespace macsim::kernels
