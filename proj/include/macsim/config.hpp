#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "macsim/datamodel.hpp"
#include "macsim/record_io.hpp"
#include "macsim/synthgen.hpp"

namespace macsim {

struct InputFiles {
  std::filesystem::path x;
  std::filesystem::path y;
  std::optional<std::filesystem::path> alignment;  // default: match on entity id
  CsvOptions csv;
};

/// A linking-method variant for compare runs; unset fields inherit the base
/// configuration.
struct Variant {
  std::string name;
  std::optional<Mode> mode;
  std::map<std::string, double> tolerances;
  std::optional<double> cutoff;
};

struct RunConfig {
  std::optional<InputFiles> input;
  std::optional<GeneratorConfig> synthgen;
  std::vector<VariableSpec> variables;
  std::vector<std::string> blocking;
  Mode mode = Mode::extended;
  double cutoff = 0.0;
  std::size_t samples = 1000;
  std::size_t thinning = 1000;
  std::uint64_t seed = 1;
  std::map<std::string, VariableMug> external_mug;
  bool reestimate_per_sample = false;
  bool skip_infeasible_blocks = false;
  bool dump_snapshots = false;
  std::size_t threads = 0;  // 0: hardware concurrency
  std::filesystem::path output_dir = "macsim_out";
  std::vector<Variant> variants;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Parses a JSON document; relative paths resolve against base_dir.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

GeneratorConfig parse_generator_config(std::string_view json_text);

}  // namespace macsim
