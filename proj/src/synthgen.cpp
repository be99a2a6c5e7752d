#include "macsim/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "macsim/error.hpp"
#include "macsim/rng.hpp"

namespace macsim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum Column : std::size_t { kSA1, kMB, kBDAY, kBYEAR, kSEX, kEYE, kCOB };

void check_rate(double r, const char* name) {
  if (!(r >= 0.0 && r <= 1.0)) throw ConfigError(std::string("rate '") + name + "' must lie in [0,1]");
}

long pow10(int digits) {
  long f = 1;
  for (int k = 0; k < digits; ++k) f *= 10;
  return f;
}

int region_of(int code) { return code / 100; }

// Uniform draw from [lo, hi] excluding `current`.
double redraw_other(Rng& rng, int lo, int hi, double current) {
  const auto span = static_cast<std::size_t>(hi - lo + 1);
  auto k = static_cast<int>(rng.below(span - 1)) + lo;
  if (k >= static_cast<int>(current)) ++k;
  return k;
}

}  // namespace

PerturbationPlan PerturbationPlan::none() {
  PerturbationPlan p;
  p.sa1_adjacent = p.mb_within_sa1 = p.bday_missing = p.bday_altered = 0.0;
  p.byear_minus2 = p.byear_plus2 = p.byear_minus1 = p.byear_plus1 = 0.0;
  p.sex_flip = p.eye_missing = p.eye_replace = 0.0;
  p.cob_missing_majority = p.cob_missing_other = p.cob_recode_other = 0.0;
  return p;
}

void PerturbationPlan::validate() const {
  check_rate(sa1_adjacent, "sa1_adjacent");
  check_rate(mb_within_sa1, "mb_within_sa1");
  check_rate(bday_missing, "bday_missing");
  check_rate(bday_altered, "bday_altered");
  check_rate(byear_minus2, "byear_minus2");
  check_rate(byear_plus2, "byear_plus2");
  check_rate(byear_minus1, "byear_minus1");
  check_rate(byear_plus1, "byear_plus1");
  check_rate(sex_flip, "sex_flip");
  check_rate(eye_missing, "eye_missing");
  check_rate(eye_replace, "eye_replace");
  check_rate(cob_missing_majority, "cob_missing_majority");
  check_rate(cob_missing_other, "cob_missing_other");
  check_rate(cob_recode_other, "cob_recode_other");
  check_rate(cob_recode_to_majority, "cob_recode_to_majority");
  if (byear_minus2 + byear_plus2 + byear_minus1 + byear_plus1 > 1.0) {
    throw ConfigError("BYEAR shift rates sum above 1");
  }
  if (eye_missing + eye_replace > 1.0) throw ConfigError("EYE rates sum above 1");
  if (cob_missing_other + cob_recode_other > 1.0) throw ConfigError("COB rates sum above 1");
}

std::vector<CountryCode> GeneratorConfig::default_country_codes() {
  // Illustrative shares only; grouped so most regions hold several codes.
  return {
      {1201, 2.3},  {1502, 0.3},  {1505, 0.05}, {2102, 5.0},  {2104, 0.2},  {2105, 0.8},
      {2107, 0.3},  {2201, 0.4},  {2303, 0.1},  {2304, 0.6},  {2308, 0.4},  {2311, 0.1},
      {2401, 0.05}, {2403, 0.04}, {2404, 0.02}, {2407, 0.05}, {3104, 1.0},  {3105, 0.2},
      {3106, 0.08}, {3108, 0.07}, {3206, 0.25}, {3207, 0.6},  {3214, 0.2},  {4102, 0.17},
      {4106, 0.4},  {4111, 0.16}, {5103, 0.15}, {5104, 0.13}, {5105, 0.8},  {5202, 0.3},
      {5203, 0.5},  {5204, 0.6},  {5205, 0.2},  {6101, 1.0},  {6102, 0.4},  {6105, 0.1},
      {6201, 0.1},  {6203, 0.2},  {7103, 0.8},  {7106, 0.1},  {7107, 0.35}, {8102, 0.15},
      {8104, 0.4},  {8202, 0.05}, {8204, 0.05}, {8206, 0.13}, {9211, 0.06}, {9225, 0.5},
      {9232, 0.1},
  };
}

const std::vector<std::string>& GeneratorConfig::columns() {
  static const std::vector<std::string> cols{"SA1", "MB", "BDAY", "BYEAR", "SEX", "EYE", "COB"};
  return cols;
}

void GeneratorConfig::validate() const {
  plan.validate();
  if (n_x > n_y) throw ConfigError("n_x must not exceed n_y");
  if (sa1_count < 1 || mb_per_sa1 < 1 || eye_categories < 1) {
    throw ConfigError("value spaces must be non-empty");
  }
  if (mb_digits < 1 || mb_digits > 9 || static_cast<long>(mb_per_sa1) >= pow10(mb_digits)) {
    throw ConfigError("mb_per_sa1 does not fit in mb_digits");
  }
  if (bday_min > bday_max || byear_min > byear_max) throw ConfigError("empty BDAY/BYEAR range");
  check_rate(cob_majority_share, "cob_majority_share");
  if (cob_codes.empty() && cob_majority_share < 1.0) throw ConfigError("COB code list is empty");
  for (const auto& c : cob_codes) {
    if (!(c.weight > 0.0)) throw ConfigError("COB weights must be positive");
    if (c.code == cob_majority_code) throw ConfigError("COB list must not repeat the majority code");
  }
  if (sa1_count < 2 && plan.sa1_adjacent > 0.0) {
    throw ConfigError("adjacent-SA1 perturbation needs at least two SA1s");
  }
  if (mb_per_sa1 < 2 && plan.mb_within_sa1 > 0.0) {
    throw ConfigError("MB perturbation needs at least two MBs per SA1");
  }
  if (bday_min == bday_max && plan.bday_altered > 0.0) {
    throw ConfigError("BDAY alteration needs at least two day codes");
  }
  if (eye_categories < 2 && plan.eye_replace > 0.0) {
    throw ConfigError("EYE replacement needs at least two categories");
  }
  if (plan.cob_recode_other * (1.0 - plan.cob_recode_to_majority) > 0.0) {
    std::map<int, int> per_region;
    for (const auto& c : cob_codes) ++per_region[region_of(c.code)];
    const bool any_sibling = std::any_of(per_region.begin(), per_region.end(),
                                         [](const auto& kv) { return kv.second > 1; });
    if (!any_sibling) throw ConfigError("within-region COB recode needs a region with two codes");
  }
}

RecordTable generate_population(const GeneratorConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, "population"));
  const long mb_factor = pow10(cfg.mb_digits);

  std::vector<double> cumulative;
  double total_weight = 0.0;
  for (const auto& c : cfg.cob_codes) cumulative.push_back(total_weight += c.weight);

  RecordTable table("RECID", GeneratorConfig::columns());
  table.reserve(cfg.n_y);
  std::vector<double> v(GeneratorConfig::columns().size());
  for (std::size_t r = 0; r < cfg.n_y; ++r) {
    v[kSA1] = cfg.sa1_first + static_cast<double>(rng.below(cfg.sa1_count));
    v[kMB] = v[kSA1] * static_cast<double>(mb_factor) + 1.0 + static_cast<double>(rng.below(cfg.mb_per_sa1));
    v[kBDAY] = cfg.bday_min + static_cast<double>(rng.below(static_cast<std::size_t>(cfg.bday_max - cfg.bday_min + 1)));
    v[kBYEAR] = cfg.byear_min + static_cast<double>(rng.below(static_cast<std::size_t>(cfg.byear_max - cfg.byear_min + 1)));
    v[kSEX] = 1.0 + static_cast<double>(rng.below(2));
    v[kEYE] = 1.0 + static_cast<double>(rng.below(cfg.eye_categories));
    if (rng.bernoulli(cfg.cob_majority_share)) {
      v[kCOB] = cfg.cob_majority_code;
    } else {
      const double pick = rng.uniform() * total_weight;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
      if (it == cumulative.end()) --it;
      v[kCOB] = cfg.cob_codes[static_cast<std::size_t>(it - cumulative.begin())].code;
    }
    table.add_record(std::to_string(r + 1), v);
  }
  return table;
}

AlignedPair subsample(const RecordTable& y, std::size_t n_x, std::uint64_t seed) {
  if (n_x > y.size()) throw ConfigError("cannot sample more X records than Y holds");
  Rng rng(seed);
  std::vector<std::size_t> idx(y.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t k = 0; k < n_x; ++k) {
    const std::size_t pick = k + rng.below(idx.size() - k);
    std::swap(idx[k], idx[pick]);
  }
  idx.resize(n_x);
  AlignedPair pair;
  pair.file_x = y.select_rows(idx);
  pair.file_y = y;
  pair.alignment = std::move(idx);
  return pair;
}

PerturbResult perturb(const RecordTable& x, const GeneratorConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto& plan = cfg.plan;
  for (std::size_t c = 0; c < GeneratorConfig::columns().size(); ++c) {
    if (x.column_index(GeneratorConfig::columns()[c]) != c) {
      throw ConfigError("perturb expects the generator column layout");
    }
  }
  const long mb_factor = pow10(cfg.mb_digits);
  const double sa1_last = cfg.sa1_first + static_cast<double>(cfg.sa1_count) - 1.0;

  std::map<int, std::vector<int>> region_codes;
  for (const auto& c : cfg.cob_codes) region_codes[region_of(c.code)].push_back(c.code);

  PerturbResult out{x, {}};
  RecordTable& t = out.table;
  PerturbationLog& log = out.log;
  Rng rng(seed);
  const std::size_t n = t.size();

  for (std::size_t r = 0; r < n; ++r) {
    if (!rng.bernoulli(plan.sa1_adjacent)) continue;
    const double sa1 = t.value(r, kSA1);
    double next = rng.bernoulli(0.5) ? sa1 + 1.0 : sa1 - 1.0;
    if (next < cfg.sa1_first) next = sa1 + 1.0;
    if (next > sa1_last) next = sa1 - 1.0;
    const double index = std::fmod(t.value(r, kMB), static_cast<double>(mb_factor));
    t.set_value(r, kSA1, next);
    t.set_value(r, kMB, next * static_cast<double>(mb_factor) + index);
    ++log.sa1_adjacent;
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (!rng.bernoulli(plan.mb_within_sa1)) continue;
    const double mb = t.value(r, kMB);
    const double index = std::fmod(mb, static_cast<double>(mb_factor));
    const double next = redraw_other(rng, 1, static_cast<int>(cfg.mb_per_sa1), index);
    t.set_value(r, kMB, mb - index + next);
    ++log.mb_within_sa1;
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (!rng.bernoulli(plan.bday_altered)) continue;
    t.set_value(r, kBDAY, redraw_other(rng, cfg.bday_min, cfg.bday_max, t.value(r, kBDAY)));
    ++log.bday_altered;
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (!rng.bernoulli(plan.bday_missing)) continue;
    t.set_value(r, kBDAY, kNaN);
    ++log.bday_missing;
  }
  for (std::size_t r = 0; r < n; ++r) {
    double u = rng.uniform();
    double shift = 0.0;
    std::size_t* counter = nullptr;
    if ((u -= plan.byear_minus2) < 0.0) {
      shift = -2.0, counter = &log.byear_minus2;
    } else if ((u -= plan.byear_plus2) < 0.0) {
      shift = 2.0, counter = &log.byear_plus2;
    } else if ((u -= plan.byear_minus1) < 0.0) {
      shift = -1.0, counter = &log.byear_minus1;
    } else if ((u -= plan.byear_plus1) < 0.0) {
      shift = 1.0, counter = &log.byear_plus1;
    }
    if (counter != nullptr) {
      t.set_value(r, kBYEAR, t.value(r, kBYEAR) + shift);
      ++*counter;
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (!rng.bernoulli(plan.sex_flip)) continue;
    t.set_value(r, kSEX, 3.0 - t.value(r, kSEX));
    ++log.sex_flip;
  }
  for (std::size_t r = 0; r < n; ++r) {
    const double u = rng.uniform();
    if (u < plan.eye_missing) {
      t.set_value(r, kEYE, kNaN);
      ++log.eye_missing;
    } else if (u < plan.eye_missing + plan.eye_replace) {
      t.set_value(r, kEYE, redraw_other(rng, 1, static_cast<int>(cfg.eye_categories), t.value(r, kEYE)));
      ++log.eye_replace;
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    const double u = rng.uniform();
    const double cob = t.value(r, kCOB);
    if (cob == cfg.cob_majority_code) {
      if (u < plan.cob_missing_majority) {
        t.set_value(r, kCOB, kNaN);
        ++log.cob_missing_majority;
      }
      continue;
    }
    const double to_majority = plan.cob_recode_other * plan.cob_recode_to_majority;
    if (u < plan.cob_missing_other) {
      t.set_value(r, kCOB, kNaN);
      ++log.cob_missing_other;
    } else if (u < plan.cob_missing_other + to_majority) {
      t.set_value(r, kCOB, cfg.cob_majority_code);
      ++log.cob_to_majority;
    } else if (u < plan.cob_missing_other + plan.cob_recode_other) {
      const auto it = region_codes.find(region_of(static_cast<int>(cob)));
      if (it == region_codes.end() || it->second.size() < 2) continue;
      const auto& codes = it->second;
      const auto self = static_cast<std::size_t>(
          std::find(codes.begin(), codes.end(), static_cast<int>(cob)) - codes.begin());
      std::size_t k = rng.below(codes.size() - 1);
      if (k >= self) ++k;
      t.set_value(r, kCOB, codes[k]);
      ++log.cob_within_region;
    }
  }
  return out;
}

SyntheticData generate(const GeneratorConfig& cfg) {
  cfg.validate();
  const RecordTable y = generate_population(cfg);
  AlignedPair pair = subsample(y, cfg.n_x, derive_seed(cfg.seed, "subsample"));
  auto result = perturb(pair.file_x, cfg, derive_seed(cfg.seed, "perturb"));
  pair.file_x = std::move(result.table);
  return {std::move(pair), result.log};
}

std::vector<VariableSpec> default_variable_specs(const GeneratorConfig& cfg) {
  auto range = [](double span) { return span > 0.0 ? span : 1.0; };
  const double mb_factor = static_cast<double>(pow10(cfg.mb_digits));
  double cob_lo = cfg.cob_majority_code;
  double cob_hi = cfg.cob_majority_code;
  for (const auto& c : cfg.cob_codes) {
    cob_lo = std::min<double>(cob_lo, c.code);
    cob_hi = std::max<double>(cob_hi, c.code);
  }
  const double sa1_span = static_cast<double>(cfg.sa1_count) - 1.0;
  return {
      {"SA1", range(sa1_span), 0.0, std::nullopt},
      {"MB", range((sa1_span + 1.0) * mb_factor), 0.0, std::nullopt},
      {"BDAY", range(cfg.bday_max - cfg.bday_min), 0.0, std::nullopt},
      {"BYEAR", range(cfg.byear_max - cfg.byear_min), 0.0, std::nullopt},
      {"SEX", 1.0, 0.0, std::nullopt},
      {"EYE", range(static_cast<double>(cfg.eye_categories) - 1.0), 0.0, std::nullopt},
      {"COB", range(cob_hi - cob_lo), 0.0, std::nullopt},
  };
}

}  // namespace macsim
