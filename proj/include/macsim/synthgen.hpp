#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "macsim/datamodel.hpp"

namespace macsim {

struct CountryCode {
  int code = 0;  // four-digit code; the first two digits name the broad region
  double weight = 1.0;
};

/// Perturbation rates, each relative to the records of file X. The defaults
/// give 500 adjacent-SA1 moves, 4,000 missing BDAYs, 50 SEX reversals, etc.
/// at n_x = 50,000.
struct PerturbationPlan {
  double sa1_adjacent = 0.01;
  double mb_within_sa1 = 0.03;
  double bday_missing = 0.08;
  double bday_altered = 0.01;
  double byear_minus2 = 0.001;
  double byear_plus2 = 0.001;
  double byear_minus1 = 0.024;
  double byear_plus1 = 0.024;
  double sex_flip = 0.001;
  double eye_missing = 0.10;
  double eye_replace = 0.10;
  double cob_missing_majority = 0.02;  // of majority-coded records
  double cob_missing_other = 0.02;     // of other-coded records
  double cob_recode_other = 0.02;      // of other-coded records
  double cob_recode_to_majority = 0.5; // share of recodes that go to the majority code

  static PerturbationPlan none();
  void validate() const;
};

struct GeneratorConfig {
  std::size_t n_y = 2000;
  std::size_t n_x = 500;
  std::uint64_t seed = 1;

  std::size_t sa1_count = 10;
  int sa1_first = 10001;
  std::size_t mb_per_sa1 = 4;
  int mb_digits = 3;  // MB = SA1 * 10^mb_digits + index
  int bday_min = 1;
  int bday_max = 365;
  int byear_min = 1920;
  int byear_max = 2019;
  std::size_t eye_categories = 5;
  int cob_majority_code = 1101;
  double cob_majority_share = 0.75;
  std::vector<CountryCode> cob_codes = default_country_codes();

  PerturbationPlan plan;

  static std::vector<CountryCode> default_country_codes();
  static const std::vector<std::string>& columns();
  void validate() const;
};

struct PerturbationLog {
  std::size_t sa1_adjacent = 0;
  std::size_t mb_within_sa1 = 0;
  std::size_t bday_altered = 0;
  std::size_t bday_missing = 0;
  std::size_t byear_minus2 = 0;
  std::size_t byear_plus2 = 0;
  std::size_t byear_minus1 = 0;
  std::size_t byear_plus1 = 0;
  std::size_t sex_flip = 0;
  std::size_t eye_missing = 0;
  std::size_t eye_replace = 0;
  std::size_t cob_missing_majority = 0;
  std::size_t cob_missing_other = 0;
  std::size_t cob_to_majority = 0;
  std::size_t cob_within_region = 0;
};

/// File Y: n_y records with ids "1".."n_y" and independently drawn fields,
/// except COB which takes the majority code with the configured share.
RecordTable generate_population(const GeneratorConfig& cfg);

/// File X as a uniform sample without replacement of n_x records from Y,
/// aligned by record id. Throws ConfigError when n_x > |Y|.
AlignedPair subsample(const RecordTable& y, std::size_t n_x, std::uint64_t seed);

struct PerturbResult {
  RecordTable table;
  PerturbationLog log;
};

/// Applies every perturbation in cfg.plan to independently selected records
/// of x. Record ids are never touched and MB always keeps its SA1 prefix.
PerturbResult perturb(const RecordTable& x, const GeneratorConfig& cfg, std::uint64_t seed);

struct SyntheticData {
  AlignedPair pair;
  PerturbationLog log;
};

/// Population, subsample and perturbation with seeds derived from cfg.seed.
SyntheticData generate(const GeneratorConfig& cfg);

/// Linking-variable specs matching the generated value spaces (tolerance 0).
std::vector<VariableSpec> default_variable_specs(const GeneratorConfig& cfg);

}  // namespace macsim
