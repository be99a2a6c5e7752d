#include "macsim/estimation.hpp"

#include <string>

#include "macsim/error.hpp"
#include "macsim/kernels.hpp"

namespace macsim {

std::vector<AgreementCounts> count_agreement(const AgreementMatrix& a,
                                             std::span<const double> theta) {
  if (theta.size() != a.variables()) throw DomainError("threshold count does not match variables");
  const auto& k = kernels::active();
  const std::size_t rx = a.rows_x();
  const std::size_t ry = a.rows_y();
  std::vector<AgreementCounts> out(a.variables());
  for (std::size_t l = 0; l < a.variables(); ++l) {
    auto& c = out[l];
    c.total = rx * ry;
    c.diagonal = rx < ry ? rx : ry;
    c.off_diagonal = c.total - c.diagonal;
    std::size_t agree_all = 0;
    for (std::size_t i = 0; i < rx; ++i) {
      const auto row = a.row(l, i);
      const auto cls = k.count_classes(row.data(), ry, theta[l]);
      agree_all += cls.agree;
      c.missing += cls.missing;
      if (i < ry) {
        const double d = row[i];
        if (is_missing_cell(d)) {
          ++c.diagonal_missing;
        } else if (d >= theta[l]) {
          ++c.diagonal_agree;
        }
      }
    }
    c.off_diagonal_agree = agree_all - c.diagonal_agree;
  }
  return out;
}

MugProfile mug_from_counts(std::span<const AgreementCounts> counts) {
  MugProfile mug;
  for (std::size_t l = 0; l < counts.size(); ++l) {
    const auto& c = counts[l];
    if (c.diagonal == 0) throw EstimationError("no matched record pairs to estimate m");
    if (c.off_diagonal == 0) throw EstimationError("no non-matched record pairs to estimate u");
    if (c.diagonal_missing == c.diagonal) {
      throw EstimationError("variable " + std::to_string(l) +
                            ": every matched comparison is missing, m is undefined");
    }
    mug.variables.push_back({static_cast<double>(c.diagonal_agree) / static_cast<double>(c.diagonal),
                             static_cast<double>(c.off_diagonal_agree) /
                                 static_cast<double>(c.off_diagonal),
                             static_cast<double>(c.missing) / static_cast<double>(c.total)});
  }
  return mug;
}

MugProfile estimate_mug(const AgreementMatrix& a, std::span<const double> theta) {
  if (a.rows_x() == 0) throw EstimationError("no matched record pairs to estimate m");
  const auto counts = count_agreement(a, theta);
  return mug_from_counts(counts);
}

double smoothing_epsilon(std::size_t off_diagonal_cells) {
  if (off_diagonal_cells == 0) throw EstimationError("smoothing needs at least one non-matched pair");
  return 1.0 / (2.0 * static_cast<double>(off_diagonal_cells));
}

MugProfile smooth_mug(const MugProfile& mug, double epsilon) {
  MugProfile out = mug;
  for (auto& v : out.variables) {
    if (v.u <= 0.0) v.u = epsilon;
    if (v.m >= 1.0) v.m = 1.0 - epsilon;
    if (v.m + v.g >= 1.0) v.m = 1.0 - v.g - epsilon;
  }
  return out;
}

namespace {

constexpr double kSlack = 1e-12;

double checked(double p, const char* name) {
  if (p >= 0.0 && p <= 1.0) return p;
  if (p > 1.0 && p <= 1.0 + kSlack) return 1.0;
  if (p < 0.0 && p >= -kSlack) return 0.0;
  throw InfeasibleMarginalsError(std::string(name) + " = " + std::to_string(p) +
                                 " lies outside [0,1]");
}

}  // namespace

VariableTransition transition_params(const VariableMug& mug) {
  const double m = mug.m;
  const double u = mug.u;
  const double g = mug.g;
  if (!(m > 0.0) || !(m + g < 1.0) || !(u + g < 1.0) || !(u >= 0.0) || !(g >= 0.0)) {
    throw InfeasibleMarginalsError("m=" + std::to_string(m) + " u=" + std::to_string(u) +
                                   " g=" + std::to_string(g) +
                                   " violate m > 0, m + g < 1, u + g < 1");
  }
  const double match_disagree = 1.0 - m - g;
  const double nonmatch_disagree = 1.0 - u - g;
  VariableTransition t;
  if (u <= 0.5 * (1.0 - g)) {
    t.p1 = checked(match_disagree / m, "p1");
    // p1 * m / (1 - m - g) reduces to exactly 1 in this branch.
    t.p2 = 1.0;
    t.q1 = checked(u / nonmatch_disagree, "q1");
  } else {
    const double denom = m * (3.0 * u + g - 1.0);
    if (!(denom > 0.0)) throw InfeasibleMarginalsError("3u + g - 1 must be positive");
    t.p1 = checked(match_disagree * nonmatch_disagree / denom, "p1");
    t.p2 = checked(t.p1 * m / match_disagree, "p2");
    t.q1 = 1.0;
  }
  t.q2 = t.q1;
  t.q3 = 1.0;
  return t;
}

TransitionParams transition_params(const MugProfile& mug) {
  TransitionParams out;
  out.variables.reserve(mug.size());
  for (std::size_t l = 0; l < mug.size(); ++l) {
    try {
      out.variables.push_back(transition_params(mug[l]));
    } catch (const InfeasibleMarginalsError& e) {
      throw InfeasibleMarginalsError("variable " + std::to_string(l) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace macsim
