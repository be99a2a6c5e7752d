// Invariants checked over many random inputs.

#include <gtest/gtest.h>

#include <cmath>

#include "macsim/comparison.hpp"
#include "macsim/estimation.hpp"
#include "macsim/linker.hpp"
#include "macsim/simulator.hpp"
#include "oracles.hpp"

using namespace macsim;

namespace {

TransitionParams random_params(std::size_t L, Rng& rng) {
  TransitionParams p;
  for (std::size_t l = 0; l < L; ++l) {
    const double q = rng.uniform();
    p.variables.push_back({rng.uniform(), rng.uniform(), q, q, 1.0});
  }
  return p;
}

}  // namespace

TEST(Property, KernelPreservesMissingnessAndValueOrbit) {
  Rng rng(100);
  for (int rep = 0; rep < 30; ++rep) {
    const std::vector<double> theta{0.6 + 0.4 * rng.uniform(), 1.0, 0.98};
    const auto a0 = oracle::random_matrix(6, 9, 3, Mode::extended, 0.15, rng, theta);
    auto state = a0;
    const auto p = random_params(3, rng);
    for (int n = 0; n < 500; ++n) kernel_step(state, p, theta, rng);
    for (std::size_t c = 0; c < a0.cell_count(); ++c) {
      const double v0 = a0.cells()[c];
      const double v = state.cells()[c];
      if (is_missing_cell(v0)) {
        EXPECT_EQ(v, v0);
      } else {
        EXPECT_TRUE(v == v0 || v == 1.0 - v0);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
}

TEST(Property, AgreeToDisagreeClearsRowAgreement) {
  Rng rng(101);
  for (int rep = 0; rep < 40; ++rep) {
    const std::vector<double> theta{0.75, 1.0};
    auto state = oracle::random_matrix(5, 7, 2, Mode::extended, 0.1, rng, theta);
    const auto p = random_params(2, rng);
    for (int n = 0; n < 300; ++n) {
      const auto before = state;
      const auto out = kernel_step(state, p, theta, rng);
      if (out.kind != StepCase::agree_to_disagree) continue;
      for (std::size_t j = 0; j < state.rows_y(); ++j) {
        if (j == out.i) continue;
        const double b = before(out.i, j, out.l);
        if (!is_missing_cell(b) && b >= theta[out.l]) {
          EXPECT_LT(state(out.i, j, out.l), theta[out.l]);
        }
      }
    }
  }
}

TEST(Property, OtherRowsUntouchedByAStep) {
  Rng rng(102);
  const std::vector<double> theta{0.9};
  auto state = oracle::random_matrix(4, 6, 1, Mode::extended, 0.1, rng, theta);
  const auto p = random_params(1, rng);
  for (int n = 0; n < 300; ++n) {
    const auto before = state;
    const auto out = kernel_step(state, p, theta, rng);
    for (std::size_t i = 0; i < 4; ++i) {
      if (i == out.i) continue;
      for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(state(i, j, 0), before(i, j, 0));
    }
  }
}

TEST(Property, ExtendedZeroToleranceMatchesOriginalCoding) {
  Rng rng(103);
  RecordTable x("RECID", {"A", "B"}), y("RECID", {"A", "B"});
  for (int r = 0; r < 30; ++r) {
    const double xv[] = {static_cast<double>(rng.below(5)), static_cast<double>(rng.below(3))};
    const double yv[] = {static_cast<double>(rng.below(5)), static_cast<double>(rng.below(3))};
    x.add_record(std::to_string(r), xv);
    y.add_record(std::to_string(r), yv);
  }
  const auto pair = align_by_id(x, y);
  const std::vector<VariableSpec> specs{{"A", 4, 0, {}}, {"B", 2, 0, {}}};
  const auto ext = build_agreement_matrix(pair, specs, Mode::extended);
  const auto orig = build_agreement_matrix(pair, specs, Mode::original);
  for (std::size_t c = 0; c < ext.cell_count(); ++c) {
    EXPECT_EQ(ext.cells()[c] >= 1.0, orig.cells()[c] == 1.0);
  }
}

TEST(Property, SimilaritySymmetricAndBounded) {
  Rng rng(104);
  const VariableSpec s{"V", 50, 0, {}};
  for (int n = 0; n < 2000; ++n) {
    const double a = rng.uniform() * 80 - 15, b = rng.uniform() * 80 - 15;
    const double v = similarity(a, b, s);
    EXPECT_EQ(v, similarity(b, a, s));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Property, CanonicalizeIsIdempotentAndDiagonal) {
  Rng rng(105);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t ny = 2 + rng.below(10);
    RecordTable y("RECID", {"V"});
    for (std::size_t r = 0; r < ny; ++r) {
      const double v[] = {static_cast<double>(r)};
      y.add_record("e" + std::to_string(r), v);
    }
    std::vector<std::size_t> pick(ny);
    for (std::size_t r = 0; r < ny; ++r) pick[r] = r;
    for (std::size_t r = ny - 1; r > 0; --r) std::swap(pick[r], pick[rng.below(r + 1)]);
    pick.resize(1 + rng.below(ny));
    const auto x = y.select_rows(pick);
    const auto once = canonicalize_alignment(align_by_id(x, y));
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(once.file_x.id(i), once.file_y.id(i));
    const auto twice = canonicalize_alignment(once);
    EXPECT_EQ(twice.file_y, once.file_y);
  }
}

TEST(Property, GreedyLinkOneToOneAndMonotoneInCutoff) {
  Rng rng(106);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t rx = 1 + rng.below(10), ry = 1 + rng.below(10);
    std::vector<double> vals(rx * ry);
    for (auto& v : vals) v = rng.uniform() * 10 - 5;
    const WeightMatrix w(rx, ry, vals);
    const double lo = rng.uniform() * 6 - 3;
    const double hi = lo + rng.uniform() * 3;
    const auto a = greedy_link(w, lo);
    const auto b = greedy_link(w, hi);
    std::vector<char> ys(ry, 0);
    for (const auto& l : a.links()) {
      EXPECT_FALSE(ys[l.y]);
      ys[l.y] = 1;
      EXPECT_GT(l.weight, lo);
    }
    EXPECT_LE(b.links().size(), a.links().size());
  }
}

TEST(Property, TransitionIdentitiesOnGrid) {
  for (double m = 0.02; m < 1.0; m += 0.02) {
    for (double u = 0.0; u < 1.0; u += 0.02) {
      for (double g = 0.0; g < 0.5; g += 0.05) {
        VariableTransition t;
        try {
          t = transition_params(VariableMug{m, u, g});
        } catch (const std::exception&) {
          continue;
        }
        for (double p : {t.p1, t.p2, t.q1, t.q2}) {
          EXPECT_GE(p, 0.0);
          EXPECT_LE(p, 1.0);
        }
        if (u <= 0.5 * (1 - g)) {
          EXPECT_EQ(t.p2, 1.0);
        }
        EXPECT_NEAR(t.p2 / (t.p1 + t.p2), m / (1 - g), 1e-12);
      }
    }
  }
}
