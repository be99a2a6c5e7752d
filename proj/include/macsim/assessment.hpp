#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "macsim/datamodel.hpp"

namespace macsim {

/// Links of the initial matrix: greedy_link over its composite weights.
LinkSet observed_links(const AgreementMatrix& a0, std::span<const double> theta,
                       const MugProfile& mug, double cutoff);

/// Correct re-link counts over the record x simulation grid. A record is
/// correct in a simulation iff its simulated partner equals its observed
/// partner; a record unlinked in the observed set is correct iff it is also
/// unlinked in the simulation.
class AccuracyReport {
 public:
  AccuracyReport() = default;
  AccuracyReport(std::vector<std::uint64_t> record_correct,
                 std::vector<std::uint64_t> simulation_correct, std::size_t observed_unlinked);

  std::size_t records() const { return record_correct_.size(); }
  std::size_t simulations() const { return simulation_correct_.size(); }
  std::size_t observed_unlinked() const { return observed_unlinked_; }
  const std::vector<std::uint64_t>& record_correct() const { return record_correct_; }
  const std::vector<std::uint64_t>& simulation_correct() const { return simulation_correct_; }

  std::vector<double> per_record() const;
  std::vector<double> per_simulation() const;

  /// Both means divide an exact integer total by records x simulations, so
  /// they agree bit for bit; the constructor rejects inconsistent totals.
  double mean_per_record() const;
  double mean_per_simulation() const;
  double grand_mean() const { return mean_per_record(); }
  std::uint64_t total_correct() const { return total_; }

  double min_per_record() const;
  double max_per_record() const;
  double min_per_simulation() const;
  double max_per_simulation() const;

 private:
  std::vector<std::uint64_t> record_correct_;
  std::vector<std::uint64_t> simulation_correct_;
  std::size_t observed_unlinked_ = 0;
  std::uint64_t total_ = 0;
};

/// Streaming form of relink_accuracy: feed one simulated LinkSet at a time.
class RelinkTally {
 public:
  explicit RelinkTally(LinkSet observed);

  void add(const LinkSet& simulated);
  std::size_t simulations() const { return simulation_correct_.size(); }
  const LinkSet& observed() const { return observed_; }
  AccuracyReport report() const;

 private:
  LinkSet observed_;
  std::vector<std::uint64_t> record_correct_;
  std::vector<std::uint64_t> simulation_correct_;
};

/// Throws DomainError when simulated is empty or a LinkSet covers a
/// different X index set.
AccuracyReport relink_accuracy(const LinkSet& observed, std::span<const LinkSet> simulated);

struct BlockAccuracy {
  std::string key;
  AccuracyReport report;
  std::size_t observed_links = 0;
};

struct AggregateReport {
  double grand_mean = 0.0;
  std::size_t records = 0;         // X records in the included blocks
  std::vector<std::string> included;
  std::vector<std::string> warnings;  // one line per excluded block
};

/// Record-count-weighted mean over blocks. Blocks with no observed links are
/// excluded with a warning. Throws DomainError when no block is given.
AggregateReport summarize(std::span<const BlockAccuracy> blocks);

}  // namespace macsim
