// Built with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include "tremble/kernels/kernels.hpp"

namespace tremble::kernels {

namespace {

double hmin(__m256d x) {
    __m128d lo = _mm256_castpd256_pd128(x), hi = _mm256_extractf128_pd(x, 1);
    __m128d m = _mm_min_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_min_sd(m, _mm_unpackhi_pd(m, m)));
}

double hmax(__m256d x) {
    __m128d lo = _mm256_castpd256_pd128(x), hi = _mm256_extractf128_pd(x, 1);
    __m128d m = _mm_max_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

}  // namespace

double gather_min_avx2(const double* v, const std::uint32_t* idx, std::size_t n) {
    if (n < 8) return gather_min_scalar(v, idx, n);
    __m256d m = _mm256_set1_pd(v[idx[0]]);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m128i k = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + i));
        m = _mm256_min_pd(m, _mm256_i32gather_pd(v, k, 8));
    }
    double r = hmin(m);
    for (; i < n; ++i) r = v[idx[i]] < r ? v[idx[i]] : r;
    return r;
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
    }
    double r = hmax(m);
    for (; i < n; ++i) {
        double d = a[i] - b[i];
        d = d < 0 ? -d : d;
        r = d > r ? d : r;
    }
    return r;
}

}  // namespace tremble::kernels
