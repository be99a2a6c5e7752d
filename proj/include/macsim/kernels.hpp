#pragma once

// Data-parallel inner loops of the pipeline. Every kernel has a scalar
// reference in kernels::scalar and, on x86-64, an AVX2 variant in
// kernels::avx2. Both produce bit-identical results; active() picks the
// widest variant the CPU supports unless MACSIM_KERNELS=scalar is set.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace macsim::kernels {

/// Rule applied to every off-diagonal cell of one (i, l) row in Step 4.
struct RowRule {
  double theta = 1.0;
  bool force_agreeing = false;   // flip every agreeing cell
  std::uint64_t flip_threshold = 0;  // disagreeing cell flips iff hash < threshold (<= 2^32)
  std::uint32_t key = 0;
  std::size_t skip = 0;          // diagonal column, left untouched
};

/// Maps a probability to a RowRule threshold: 0 -> never, 1 -> always.
std::uint64_t flip_threshold(double probability);

/// Counter-based 32-bit hash used for per-cell Bernoulli draws.
inline std::uint32_t cell_hash(std::uint32_t key, std::uint32_t j) {
  std::uint32_t x = key + j * 0x9E3779B9u;
  x ^= x >> 16;
  x *= 0x7feb352du;
  x ^= x >> 15;
  x *= 0x846ca68bu;
  x ^= x >> 16;
  return x;
}

struct ClassCounts {
  std::size_t agree = 0;
  std::size_t missing = 0;

  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

using SimilarityRowFn = void (*)(double x, const double* y, std::size_t n, double t_range,
                                 bool exact, double* out);
using RowUpdateFn = std::size_t (*)(double* row, std::size_t n, const RowRule& rule);
using AccumulateWeightsFn = void (*)(const double* row, std::size_t n, double theta,
                                     double w_agree, double w_disagree, double* acc);
using CountChangedFn = std::size_t (*)(const double* a, const double* b, std::size_t n);
using CountClassesFn = ClassCounts (*)(const double* row, std::size_t n, double theta);

struct KernelTable {
  std::string_view name;
  /// out[j] = kMissing if x or y[j] is NaN; exact: 1/0 on equality;
  /// otherwise max(0, 1 - |x - y[j]| / t_range).
  SimilarityRowFn similarity_row;
  /// Applies rule to row; returns the number of cells changed.
  RowUpdateFn row_update;
  /// acc[j] += 0 for missing, w_agree if row[j] >= theta, else w_disagree.
  AccumulateWeightsFn accumulate_weights;
  /// Number of positions where a and b differ.
  CountChangedFn count_changed;
  /// Agreeing (>= theta) and missing cells in row.
  CountClassesFn count_classes;
};

namespace scalar {
const KernelTable& table();
}

#if MACSIM_HAVE_AVX2
namespace avx2 {
const KernelTable& table();
}
#endif

bool avx2_supported();

/// Table selected at first use.
const KernelTable& active();

}  // namespace macsim::kernels
