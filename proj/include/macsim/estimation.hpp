#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "macsim/datamodel.hpp"

namespace macsim {

/// Raw tallies behind an m/u/g estimate for one variable.
struct AgreementCounts {
  std::size_t diagonal = 0;
  std::size_t diagonal_agree = 0;
  std::size_t diagonal_missing = 0;
  std::size_t off_diagonal = 0;
  std::size_t off_diagonal_agree = 0;
  std::size_t missing = 0;  // all cells of the variable
  std::size_t total = 0;

  friend bool operator==(const AgreementCounts&, const AgreementCounts&) = default;
};

/// Counts agreeing and missing cells per variable. The diagonal (i, i) holds
/// the matched pairs.
std::vector<AgreementCounts> count_agreement(const AgreementMatrix& a, std::span<const double> theta);

/// m = diagonal agreements / diagonal cells, u = off-diagonal agreements /
/// off-diagonal cells, g = missing cells / all cells. Missing cells count as
/// not agreeing in m and u. Throws EstimationError when there are no matched
/// pairs, no non-matched pairs, or a variable's diagonal is entirely missing.
MugProfile estimate_mug(const AgreementMatrix& a, std::span<const double> theta);
MugProfile mug_from_counts(std::span<const AgreementCounts> counts);

/// 1 / (2 * off-diagonal cells).
double smoothing_epsilon(std::size_t off_diagonal_cells);

/// Moves boundary estimates inside the open domain: u = 0 -> eps,
/// m = 1 -> 1 - eps, and m + g >= 1 -> m = 1 - g - eps.
MugProfile smooth_mug(const MugProfile& mug, double epsilon);

/// Kernel probabilities that keep P(diagonal agrees) = m and
/// P(off-diagonal agrees) = u stationary. Requires m > 0, m + g < 1,
/// u + g < 1; throws InfeasibleMarginalsError otherwise or when a result
/// leaves [0,1] by more than 1e-12.
TransitionParams transition_params(const MugProfile& mug);
VariableTransition transition_params(const VariableMug& mug);

}  // namespace macsim
