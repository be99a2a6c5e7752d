#pragma once

#include <span>
#include <vector>

#include "macsim/datamodel.hpp"

namespace macsim {

/// ln(m/u) for agreement and ln((1-m-g)/(1-u-g)) for disagreement; missing
/// comparisons contribute 0. Natural log: a different base rescales every
/// weight, so cutoffs must be rescaled with it.
struct FieldWeights {
  double agree = 0.0;
  double disagree = 0.0;
};

/// Throws DomainError unless 0 < m, 0 < u, m + g < 1 and u + g < 1.
FieldWeights field_weights(const VariableMug& mug);
double field_weight(double cell, double theta, const VariableMug& mug);

class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(std::size_t rows_x, std::size_t rows_y)
      : rows_x_(rows_x), rows_y_(rows_y), w_(rows_x * rows_y, 0.0) {}
  WeightMatrix(std::size_t rows_x, std::size_t rows_y, std::vector<double> values);

  std::size_t rows_x() const { return rows_x_; }
  std::size_t rows_y() const { return rows_y_; }
  double operator()(std::size_t i, std::size_t j) const { return w_[i * rows_y_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return w_[i * rows_y_ + j]; }
  std::span<double> row(std::size_t i) { return {w_.data() + i * rows_y_, rows_y_}; }
  std::span<const double> values() const { return w_; }

 private:
  std::size_t rows_x_ = 0;
  std::size_t rows_y_ = 0;
  std::vector<double> w_;
};

/// W_ij = sum over variables of the field weight of cell (i, j, l).
WeightMatrix composite_weights(const AgreementMatrix& a, std::span<const double> theta,
                               const MugProfile& mug);

/// Scans pairs by descending weight (ties by ascending i, then j) and links a
/// pair iff its weight is strictly above cutoff and neither record is linked
/// yet. Throws DomainError on a NaN weight.
LinkSet greedy_link(const WeightMatrix& w, double cutoff);

}  // namespace macsim
