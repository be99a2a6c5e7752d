#include "macsim/linker.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "macsim/error.hpp"
#include "macsim/kernels.hpp"

namespace macsim {

FieldWeights field_weights(const VariableMug& mug) {
  if (!(mug.m > 0.0) || !(mug.u > 0.0) || !(mug.m + mug.g < 1.0) || !(mug.u + mug.g < 1.0)) {
    throw DomainError("field weights need 0 < m, 0 < u, m + g < 1, u + g < 1 (got m=" +
                      std::to_string(mug.m) + " u=" + std::to_string(mug.u) +
                      " g=" + std::to_string(mug.g) + ")");
  }
  return {std::log(mug.m / mug.u), std::log((1.0 - mug.m - mug.g) / (1.0 - mug.u - mug.g))};
}

double field_weight(double cell, double theta, const VariableMug& mug) {
  const auto w = field_weights(mug);
  if (is_missing_cell(cell)) return 0.0;
  return cell >= theta ? w.agree : w.disagree;
}

WeightMatrix::WeightMatrix(std::size_t rows_x, std::size_t rows_y, std::vector<double> values)
    : rows_x_(rows_x), rows_y_(rows_y), w_(std::move(values)) {
  if (w_.size() != rows_x * rows_y) throw DomainError("weight matrix size mismatch");
}

WeightMatrix composite_weights(const AgreementMatrix& a, std::span<const double> theta,
                               const MugProfile& mug) {
  if (theta.size() != a.variables() || mug.size() != a.variables()) {
    throw DomainError("thresholds and m/u/g must cover every variable");
  }
  const auto& k = kernels::active();
  WeightMatrix w(a.rows_x(), a.rows_y());
  for (std::size_t l = 0; l < a.variables(); ++l) {
    const auto fw = field_weights(mug[l]);
    for (std::size_t i = 0; i < a.rows_x(); ++i) {
      k.accumulate_weights(a.row(l, i).data(), a.rows_y(), theta[l], fw.agree, fw.disagree,
                           w.row(i).data());
    }
  }
  return w;
}

namespace {

struct Candidate {
  double weight;
  std::size_t i;
  std::size_t j;
};

}  // namespace

LinkSet greedy_link(const WeightMatrix& w, double cutoff) {
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < w.rows_x(); ++i) {
    for (std::size_t j = 0; j < w.rows_y(); ++j) {
      const double v = w(i, j);
      if (std::isnan(v)) throw DomainError("NaN composite weight");
      if (v > cutoff) candidates.push_back({v, i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  LinkSet links(w.rows_x(), w.rows_y());
  for (const auto& c : candidates) {
    if (links.is_linked(c.i) || links.is_y_linked(c.j)) continue;
    links.add(c.i, c.j, c.weight);
  }
  return links;
}

}  // namespace macsim
