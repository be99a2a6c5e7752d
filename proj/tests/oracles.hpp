#pragma once

// Independent reference implementations used to check the library.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "macsim/datamodel.hpp"
#include "macsim/linker.hpp"
#include "macsim/rng.hpp"

namespace macsim::oracle {

/// Extract-global-max-and-delete: repeatedly take the largest remaining
/// weight (first in row-major order on ties), stop when it is not above the
/// cutoff, then delete its row and column.
inline std::vector<Link> extract_max_link(const WeightMatrix& w, double cutoff) {
  std::vector<char> row_gone(w.rows_x(), 0), col_gone(w.rows_y(), 0);
  std::vector<Link> out;
  for (;;) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    bool found = false;
    for (std::size_t i = 0; i < w.rows_x(); ++i) {
      if (row_gone[i]) continue;
      for (std::size_t j = 0; j < w.rows_y(); ++j) {
        if (col_gone[j]) continue;
        if (!found || w(i, j) > best) {
          best = w(i, j);
          bi = i;
          bj = j;
          found = true;
        }
      }
    }
    if (!found || !(best > cutoff)) break;
    out.push_back({bi, bj, best});
    row_gone[bi] = 1;
    col_gone[bj] = 1;
  }
  return out;
}

/// Weight of one cell written straight from the definition.
inline double cell_weight(double cell, double theta, const VariableMug& v) {
  if (cell < 0) return 0.0;
  if (cell >= theta) return std::log(v.m / v.u);
  return std::log((1 - v.m - v.g) / (1 - v.u - v.g));
}

/// Transition probabilities written directly from the closed forms, without
/// any snapping.
inline VariableTransition literal_params(const VariableMug& v) {
  const double m = v.m, u = v.u, g = v.g;
  VariableTransition t;
  if (u <= 0.5 * (1 - g)) {
    t.p1 = (1 - m - g) / m;
    t.p2 = t.p1 * m / (1 - m - g);
    t.q1 = t.q2 = u / (1 - u - g);
  } else {
    t.p1 = (1 - m - g) * (1 - u - g) / (m * (3 * u + g - 1));
    t.p2 = t.p1 * m / (1 - m - g);
    t.q1 = t.q2 = 1.0;
  }
  t.q3 = 1.0;
  return t;
}

/// Random matrix: each cell missing with probability p_missing, otherwise a
/// value drawn from {0, 1} (original) or [0, 1] (extended), mixed with some
/// values sitting exactly on theta.
inline AgreementMatrix random_matrix(std::size_t rx, std::size_t ry, std::size_t L, Mode mode,
                                     double p_missing, Rng& rng,
                                     const std::vector<double>& theta = {}) {
  AgreementMatrix a(rx, ry, L, mode);
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t i = 0; i < rx; ++i) {
      for (std::size_t j = 0; j < ry; ++j) {
        double v;
        if (rng.bernoulli(p_missing)) {
          v = kMissing;
        } else if (mode == Mode::original) {
          v = rng.bernoulli(0.5) ? 1.0 : 0.0;
        } else if (!theta.empty() && rng.bernoulli(0.1)) {
          v = theta[l];
        } else {
          v = rng.bernoulli(0.2) ? 1.0 : rng.uniform();
        }
        a(i, j, l) = v;
      }
    }
  }
  return a;
}

}  // namespace macsim::oracle
