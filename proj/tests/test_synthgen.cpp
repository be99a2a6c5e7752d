#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "macsim/error.hpp"
#include "macsim/synthgen.hpp"

using namespace macsim;

namespace {

enum Col { kSA1, kMB, kBDAY, kBYEAR, kSEX, kEYE, kCOB };

GeneratorConfig small(std::size_t ny, std::size_t nx) {
  GeneratorConfig cfg;
  cfg.n_y = ny;
  cfg.n_x = nx;
  return cfg;
}

}  // namespace

TEST(Population, UniqueIdsAndMbInsideSa1) {
  auto cfg = small(4, 2);
  cfg.sa1_count = 2;
  const auto y = generate_population(cfg);
  ASSERT_EQ(y.size(), 4u);
  EXPECT_NO_THROW(y.validate_unique_ids());
  for (std::size_t r = 0; r < y.size(); ++r) {
    EXPECT_EQ(std::floor(y.value(r, kMB) / 1000), y.value(r, kSA1));
    EXPECT_GE(y.value(r, kSA1), 10001);
    EXPECT_LE(y.value(r, kSA1), 10002);
  }
  EXPECT_EQ(generate_population(cfg), y);
}

TEST(Population, MajorityCobShare) {
  auto cfg = small(20000, 10);
  const auto y = generate_population(cfg);
  std::size_t major = 0;
  for (std::size_t r = 0; r < y.size(); ++r) major += y.value(r, kCOB) == cfg.cob_majority_code;
  const double sd = std::sqrt(20000 * 0.75 * 0.25);
  EXPECT_NEAR(static_cast<double>(major), 15000.0, 4 * sd);
}

TEST(Subsample, WithoutReplacementAndAligned) {
  auto cfg = small(50, 50);
  const auto y = generate_population(cfg);
  const auto full = subsample(y, 50, 3);
  std::set<std::string> ids(full.file_x.ids().begin(), full.file_x.ids().end());
  EXPECT_EQ(ids.size(), 50u);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(full.file_x.id(i), full.file_y.id(full.alignment[i]));
  }
  EXPECT_EQ(subsample(y, 1, 3).file_x.size(), 1u);
  EXPECT_THROW(subsample(y, 51, 3), ConfigError);
}

TEST(Perturb, ZeroPlanIsIdentity) {
  auto cfg = small(200, 100);
  cfg.plan = PerturbationPlan::none();
  const auto data = generate(cfg);
  const auto& x = data.pair.file_x;
  const auto& y = data.pair.file_y;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t c = 0; c < x.column_count(); ++c) {
      EXPECT_EQ(x.value(i, c), y.value(data.pair.alignment[i], c));
    }
  }
}

TEST(Perturb, FullSexFlipReversesEverySex) {
  auto cfg = small(100, 100);
  cfg.plan = PerturbationPlan::none();
  cfg.plan.sex_flip = 1.0;
  const auto data = generate(cfg);
  for (std::size_t i = 0; i < 100; ++i) {
    const double sx = data.pair.file_x.value(i, kSEX);
    const double sy = data.pair.file_y.value(data.pair.alignment[i], kSEX);
    EXPECT_EQ(sx + sy, 3.0);
  }
  EXPECT_EQ(data.log.sex_flip, 100u);
}

TEST(Perturb, IdsUntouchedAndMbFollowsSa1) {
  auto cfg = small(3000, 1000);
  cfg.plan.sa1_adjacent = 0.3;
  const auto data = generate(cfg);
  const auto& x = data.pair.file_x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x.id(i), data.pair.file_y.id(data.pair.alignment[i]));
    EXPECT_EQ(std::floor(x.value(i, kMB) / 1000), x.value(i, kSA1));
  }
  EXPECT_GT(data.log.sa1_adjacent, 200u);
}

TEST(Perturb, DeterministicForSeed) {
  auto cfg = small(500, 200);
  const auto a = generate(cfg);
  const auto b = generate(cfg);
  EXPECT_EQ(a.pair.file_x, b.pair.file_x);
  EXPECT_EQ(a.pair.file_y, b.pair.file_y);
  cfg.seed = 2;
  EXPECT_FALSE(generate(cfg).pair.file_x == a.pair.file_x);
}

TEST(GeneratorConfig, RejectsInconsistentSettings) {
  auto cfg = small(10, 20);
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small(10, 5);
  cfg.plan.eye_missing = 0.6;
  cfg.plan.eye_replace = 0.6;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = small(10, 5);
  cfg.sa1_count = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(GeneratorConfig, DefaultSpecsCoverColumns) {
  const auto specs = default_variable_specs(GeneratorConfig{});
  ASSERT_EQ(specs.size(), GeneratorConfig::columns().size());
  for (const auto& s : specs) EXPECT_NO_THROW(s.validate());
}
