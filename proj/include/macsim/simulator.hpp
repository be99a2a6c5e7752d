#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "macsim/datamodel.hpp"
#include "macsim/rng.hpp"

namespace macsim {

struct ChainConfig {
  std::size_t samples = 1000;   // S
  std::size_t thinning = 1000;  // d
  std::uint64_t seed = 1;
  Mode mode = Mode::extended;

  void validate() const;
};

struct ChainSample {
  std::size_t index = 0;  // 1-based
  AgreementMatrix matrix;
  double distance = 0.0;  // to sample 1
};

enum class StepCase {
  skipped_missing,      // selected diagonal cell is missing
  unchanged,            // diagonal agreed and still agrees
  agree_to_disagree,    // 4a
  disagree_to_agree,    // 4b
  disagree_stays,       // 4c
};

struct StepOutcome {
  std::size_t i = 0;
  std::size_t l = 0;
  StepCase kind = StepCase::unchanged;
  std::size_t cells_changed = 0;  // diagonal included
};

/// One transition of the chain, in place. Picks (i, l) uniformly, flips the
/// diagonal value v -> 1 - v with probability p1 (agreeing) or p2
/// (disagreeing), then sweeps the off-diagonal cells of row (i, l) according
/// to the before/after agreement status of the diagonal. Missing cells never
/// change. Requires theta > 0.5.
StepOutcome kernel_step(AgreementMatrix& state, const TransitionParams& params,
                        std::span<const double> theta, Rng& rng);

using SampleVisitor = std::function<void(std::size_t index, const AgreementMatrix& state)>;

/// Runs S * d steps from a0, calling visit after every d-th step with the
/// 1-based sample index. The chain owns a working copy of a0.
void run_chain(const AgreementMatrix& a0, const TransitionParams& params,
               std::span<const double> theta, const ChainConfig& cfg, const SampleVisitor& visit);

/// Materialized form of run_chain; distances are measured against sample 1.
std::vector<ChainSample> simulate_chain(const AgreementMatrix& a0, const TransitionParams& params,
                                        std::span<const double> theta, const ChainConfig& cfg);

/// Fraction of cells whose value differs from reference.
double distance(const AgreementMatrix& sample, const AgreementMatrix& reference);

/// Binary dump of a snapshot sequence: "MCSM" magic, u32 version,
/// u64 rows_x, rows_y, variables, u8 mode, u64 count, then count blocks of
/// little-endian doubles in storage order.
class SnapshotWriter {
 public:
  SnapshotWriter(const std::filesystem::path& path, const AgreementMatrix& shape);
  ~SnapshotWriter();
  SnapshotWriter(const SnapshotWriter&) = delete;
  SnapshotWriter& operator=(const SnapshotWriter&) = delete;

  void append(const AgreementMatrix& m);
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<AgreementMatrix> read_snapshots(const std::filesystem::path& path);

/// FNV-1a over the raw cell bytes; used to prove two runs saw the same A*.
class SnapshotHasher {
 public:
  void add(const AgreementMatrix& m);
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

}  // namespace macsim
