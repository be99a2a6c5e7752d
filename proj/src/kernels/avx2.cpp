// Compiled with -mavx2. Only reached when the CPU reports AVX2 support.

#include <immintrin.h>

#include <bit>
#include <cmath>

#include "macsim/datamodel.hpp"
#include "macsim/kernels.hpp"

namespace macsim::kernels::avx2 {
namespace {

constexpr std::size_t kLanes = 4;

inline unsigned popcount4(__m256d mask) {
  return static_cast<unsigned>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(mask))));
}

void similarity_row(double x, const double* y, std::size_t n, double t_range, bool exact,
                    double* out) {
  const __m256d missing = _mm256_set1_pd(kMissing);
  std::size_t j = 0;
  if (std::isnan(x)) {
    for (; j + kLanes <= n; j += kLanes) _mm256_storeu_pd(out + j, missing);
    for (; j < n; ++j) out[j] = kMissing;
    return;
  }
  const __m256d xv = _mm256_set1_pd(x);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d range = _mm256_set1_pd(t_range);
  const __m256d sign = _mm256_set1_pd(-0.0);
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d yv = _mm256_loadu_pd(y + j);
    const __m256d nan = _mm256_cmp_pd(yv, yv, _CMP_UNORD_Q);
    __m256d v;
    if (exact) {
      v = _mm256_and_pd(_mm256_cmp_pd(xv, yv, _CMP_EQ_OQ), one);
    } else {
      const __m256d d = _mm256_andnot_pd(sign, _mm256_sub_pd(xv, yv));
      v = _mm256_sub_pd(one, _mm256_div_pd(d, range));
      v = _mm256_blendv_pd(zero, v, _mm256_cmp_pd(v, zero, _CMP_GT_OQ));
    }
    _mm256_storeu_pd(out + j, _mm256_blendv_pd(v, missing, nan));
  }
  if (j < n) scalar::table().similarity_row(x, y + j, n - j, t_range, exact, out + j);
}

// Bernoulli mask for lanes j..j+3: hash(key, j) < threshold.
inline __m256d bernoulli_mask(const RowRule& rule, std::size_t j) {
  if (rule.flip_threshold == 0) return _mm256_setzero_pd();
  if (rule.flip_threshold >= (std::uint64_t{1} << 32)) {
    return _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
  }
  const auto base = static_cast<std::uint32_t>(j);
  __m128i idx = _mm_add_epi32(_mm_set1_epi32(static_cast<int>(base)), _mm_setr_epi32(0, 1, 2, 3));
  __m128i h = _mm_add_epi32(_mm_set1_epi32(static_cast<int>(rule.key)),
                            _mm_mullo_epi32(idx, _mm_set1_epi32(static_cast<int>(0x9E3779B9u))));
  h = _mm_xor_si128(h, _mm_srli_epi32(h, 16));
  h = _mm_mullo_epi32(h, _mm_set1_epi32(0x7feb352d));
  h = _mm_xor_si128(h, _mm_srli_epi32(h, 15));
  h = _mm_mullo_epi32(h, _mm_set1_epi32(static_cast<int>(0x846ca68bu)));
  h = _mm_xor_si128(h, _mm_srli_epi32(h, 16));
  const __m128i bias = _mm_set1_epi32(static_cast<int>(0x80000000u));
  const auto thr = static_cast<std::uint32_t>(rule.flip_threshold);
  const __m128i lt = _mm_cmpgt_epi32(_mm_xor_si128(_mm_set1_epi32(static_cast<int>(thr)), bias),
                                     _mm_xor_si128(h, bias));
  return _mm256_castsi256_pd(_mm256_cvtepi32_epi64(lt));
}

std::size_t update_range(double* row, std::size_t begin, std::size_t end, const RowRule& rule) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d theta = _mm256_set1_pd(rule.theta);
  const __m256d force = rule.force_agreeing ? _mm256_castsi256_pd(_mm256_set1_epi64x(-1)) : zero;
  std::size_t changed = 0;
  std::size_t j = begin;
  for (; j + kLanes <= end; j += kLanes) {
    const __m256d v = _mm256_loadu_pd(row + j);
    const __m256d missing = _mm256_cmp_pd(v, zero, _CMP_LT_OQ);
    const __m256d agree = _mm256_cmp_pd(v, theta, _CMP_GE_OQ);
    const __m256d flip_agree = _mm256_and_pd(agree, force);
    const __m256d flip_disagree =
        _mm256_andnot_pd(_mm256_or_pd(agree, missing), bernoulli_mask(rule, j));
    const __m256d flip = _mm256_or_pd(flip_agree, flip_disagree);
    _mm256_storeu_pd(row + j, _mm256_blendv_pd(v, _mm256_sub_pd(one, v), flip));
    changed += popcount4(flip);
  }
  for (; j < end; ++j) {
    const double v = row[j];
    if (v < 0.0) continue;
    const bool flip = v >= rule.theta
                          ? rule.force_agreeing
                          : cell_hash(rule.key, static_cast<std::uint32_t>(j)) < rule.flip_threshold;
    if (flip) {
      row[j] = 1.0 - v;
      ++changed;
    }
  }
  return changed;
}

std::size_t row_update(double* row, std::size_t n, const RowRule& rule) {
  const std::size_t skip = rule.skip < n ? rule.skip : n;
  std::size_t changed = update_range(row, 0, skip, rule);
  if (skip < n) changed += update_range(row, skip + 1, n, rule);
  return changed;
}

void accumulate_weights(const double* row, std::size_t n, double theta, double w_agree,
                        double w_disagree, double* acc) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d th = _mm256_set1_pd(theta);
  const __m256d wa = _mm256_set1_pd(w_agree);
  const __m256d wd = _mm256_set1_pd(w_disagree);
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d v = _mm256_loadu_pd(row + j);
    __m256d w = _mm256_blendv_pd(wd, wa, _mm256_cmp_pd(v, th, _CMP_GE_OQ));
    w = _mm256_blendv_pd(w, zero, _mm256_cmp_pd(v, zero, _CMP_LT_OQ));
    _mm256_storeu_pd(acc + j, _mm256_add_pd(_mm256_loadu_pd(acc + j), w));
  }
  if (j < n) {
    scalar::table().accumulate_weights(row + j, n - j, theta, w_agree, w_disagree, acc + j);
  }
}

std::size_t count_changed(const double* a, const double* b, std::size_t n) {
  std::size_t changed = 0;
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    changed += popcount4(_mm256_cmp_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), _CMP_NEQ_UQ));
  }
  if (k < n) changed += scalar::table().count_changed(a + k, b + k, n - k);
  return changed;
}

ClassCounts count_classes(const double* row, std::size_t n, double theta) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d th = _mm256_set1_pd(theta);
  ClassCounts c;
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d v = _mm256_loadu_pd(row + j);
    c.missing += popcount4(_mm256_cmp_pd(v, zero, _CMP_LT_OQ));
    c.agree += popcount4(_mm256_cmp_pd(v, th, _CMP_GE_OQ));
  }
  if (j < n) {
    const ClassCounts tail = scalar::table().count_classes(row + j, n - j, theta);
    c.agree += tail.agree;
    c.missing += tail.missing;
  }
  return c;
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{"avx2",             similarity_row, row_update,
                             accumulate_weights, count_changed,  count_classes};
  return t;
}

}  // namespace macsim::kernels::avx2
