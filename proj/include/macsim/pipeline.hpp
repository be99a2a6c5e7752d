#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "macsim/assessment.hpp"
#include "macsim/config.hpp"
#include "macsim/datamodel.hpp"
#include "macsim/synthgen.hpp"

namespace macsim {

/// One fully resolved linking method.
struct ResolvedVariant {
  std::string name;
  Mode mode = Mode::extended;
  std::vector<VariableSpec> specs;  // linking variables with this variant's tolerances
  double cutoff = 0.0;
};

enum class BlockStatus { ok, empty, degenerate, infeasible };
std::string_view to_string(BlockStatus status);

struct VariantOutcome {
  std::vector<double> theta;
  MugProfile mug;
  TransitionParams params;
  LinkSet observed;
  AccuracyReport report;
};

struct BlockResult {
  std::size_t index = 0;
  std::string key;
  BlockStatus status = BlockStatus::ok;
  std::string note;
  std::size_t n_x = 0;  // X records on the diagonal
  std::size_t n_y = 0;
  std::size_t excluded_x = 0;
  std::vector<std::string> x_ids;
  std::vector<std::string> y_ids;
  std::vector<std::array<double, 2>> distances;  // (to sample 1, to A0) per sample
  std::uint64_t snapshot_hash = 0;
  std::vector<VariantOutcome> variants;
};

struct RunResult {
  std::vector<ResolvedVariant> variants;
  std::vector<std::string> link_variables;
  std::vector<BlockResult> blocks;
  std::vector<AggregateReport> aggregates;  // one per variant
};

/// Input pair from files or the synthgen section.
AlignedPair load_input(const RunConfig& cfg);

/// Linking methods of a run: the base config alone, or one per compare
/// variant. Blocking variables are dropped from the linking variables.
std::vector<ResolvedVariant> resolve_variants(const RunConfig& cfg);

/// Runs every block: builds A0, estimates (or loads) m/u/g, derives the
/// kernel parameters, links, simulates the chain once with the first
/// variant's parameters and re-links each snapshot under every variant.
/// Throws InfeasibleMarginalsError unless cfg.skip_infeasible_blocks.
RunResult execute(const AlignedPair& pair, const RunConfig& cfg,
                  const std::vector<ResolvedVariant>& variants);

/// execute + report files under cfg.output_dir.
RunResult run_assess(const RunConfig& cfg);
RunResult run_compare(const RunConfig& cfg);

/// Writes X.csv, Y.csv and alignment.csv.
PerturbationLog run_generate(const GeneratorConfig& cfg, const std::filesystem::path& out_dir);

// Report writers.
void write_block_reports(const std::filesystem::path& dir, const RunResult& run,
                         const BlockResult& block, std::size_t variant);
void write_summary(const std::filesystem::path& path, const RunResult& run, std::size_t variant);
void write_comparison(const std::filesystem::path& path, const RunResult& run);
void write_mug(const std::filesystem::path& path, const std::vector<std::string>& names,
               const MugProfile& mug);
void write_params(const std::filesystem::path& path, const std::vector<std::string>& names,
                  const TransitionParams& params);

}  // namespace macsim
