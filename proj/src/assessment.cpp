#include "macsim/assessment.hpp"

#include <algorithm>
#include <numeric>

#include "macsim/error.hpp"
#include "macsim/linker.hpp"

namespace macsim {

LinkSet observed_links(const AgreementMatrix& a0, std::span<const double> theta,
                       const MugProfile& mug, double cutoff) {
  return greedy_link(composite_weights(a0, theta, mug), cutoff);
}

AccuracyReport::AccuracyReport(std::vector<std::uint64_t> record_correct,
                               std::vector<std::uint64_t> simulation_correct,
                               std::size_t observed_unlinked)
    : record_correct_(std::move(record_correct)),
      simulation_correct_(std::move(simulation_correct)),
      observed_unlinked_(observed_unlinked) {
  const auto by_record =
      std::accumulate(record_correct_.begin(), record_correct_.end(), std::uint64_t{0});
  const auto by_simulation =
      std::accumulate(simulation_correct_.begin(), simulation_correct_.end(), std::uint64_t{0});
  if (by_record != by_simulation) {
    throw DomainError("per-record and per-simulation correct counts disagree");
  }
  total_ = by_record;
}

namespace {

std::vector<double> proportions(const std::vector<std::uint64_t>& counts, std::size_t denom) {
  std::vector<double> out(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    out[k] = denom ? static_cast<double>(counts[k]) / static_cast<double>(denom) : 0.0;
  }
  return out;
}

double series_mean(const std::vector<std::uint64_t>& counts, std::size_t cells) {
  if (cells == 0) return 0.0;
  const auto total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  return static_cast<double>(total) / static_cast<double>(cells);
}

double extreme(const std::vector<double>& v, bool want_max) {
  if (v.empty()) return 0.0;
  return want_max ? *std::max_element(v.begin(), v.end()) : *std::min_element(v.begin(), v.end());
}

}  // namespace

std::vector<double> AccuracyReport::per_record() const {
  return proportions(record_correct_, simulations());
}

std::vector<double> AccuracyReport::per_simulation() const {
  return proportions(simulation_correct_, records());
}

double AccuracyReport::mean_per_record() const {
  return series_mean(record_correct_, records() * simulations());
}

double AccuracyReport::mean_per_simulation() const {
  return series_mean(simulation_correct_, records() * simulations());
}

double AccuracyReport::min_per_record() const { return extreme(per_record(), false); }
double AccuracyReport::max_per_record() const { return extreme(per_record(), true); }
double AccuracyReport::min_per_simulation() const { return extreme(per_simulation(), false); }
double AccuracyReport::max_per_simulation() const { return extreme(per_simulation(), true); }

RelinkTally::RelinkTally(LinkSet observed)
    : observed_(std::move(observed)), record_correct_(observed_.rows_x(), 0) {}

void RelinkTally::add(const LinkSet& simulated) {
  if (simulated.rows_x() != observed_.rows_x()) {
    throw DomainError("simulated links cover a different X record set");
  }
  std::uint64_t correct = 0;
  for (std::size_t x = 0; x < observed_.rows_x(); ++x) {
    if (simulated.partner(x) == observed_.partner(x)) {
      ++record_correct_[x];
      ++correct;
    }
  }
  simulation_correct_.push_back(correct);
}

AccuracyReport RelinkTally::report() const {
  return AccuracyReport(record_correct_, simulation_correct_, observed_.unlinked_x().size());
}

AccuracyReport relink_accuracy(const LinkSet& observed, std::span<const LinkSet> simulated) {
  if (simulated.empty()) throw DomainError("relink accuracy needs at least one simulation");
  RelinkTally tally(observed);
  for (const auto& s : simulated) tally.add(s);
  return tally.report();
}

AggregateReport summarize(std::span<const BlockAccuracy> blocks) {
  if (blocks.empty()) throw DomainError("nothing to summarize");
  AggregateReport out;
  std::uint64_t correct = 0;
  std::uint64_t cells = 0;
  double weighted = 0.0;
  bool uniform_samples = true;
  std::size_t samples = 0;
  for (const auto& b : blocks) {
    if (b.observed_links == 0) {
      out.warnings.push_back(b.key + ": no observed links, excluded");
      continue;
    }
    if (samples == 0) samples = b.report.simulations();
    uniform_samples = uniform_samples && samples == b.report.simulations();
    out.included.push_back(b.key);
    out.records += b.report.records();
    correct += b.report.total_correct();
    cells += static_cast<std::uint64_t>(b.report.records()) * b.report.simulations();
    weighted += static_cast<double>(b.report.records()) * b.report.grand_mean();
  }
  if (out.records == 0) return out;
  out.grand_mean = uniform_samples ? static_cast<double>(correct) / static_cast<double>(cells)
                                   : weighted / static_cast<double>(out.records);
  return out;
}

}  // namespace macsim
