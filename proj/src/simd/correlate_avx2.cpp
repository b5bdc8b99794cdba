#include "nlwave/simd.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define NLWAVE_HAVE_X86 1
#include <immintrin.h>
#else
#define NLWAVE_HAVE_X86 0
#endif

namespace nlwave::simd::detail {

#if NLWAVE_HAVE_X86

bool avx2_supported() {
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok;
}

// Four outputs per lane group, two groups in flight to hide FMA latency.
__attribute__((target("avx2,fma"))) void correlate_avx2(const double* input,
                                                        const double* weights, std::size_t taps,
                                                        double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d acc0 = _mm256_setzero_pd();
        __m256d acc1 = _mm256_setzero_pd();
        const double* x = input + i;
        for (std::size_t k = 0; k < taps; ++k) {
            const __m256d w = _mm256_broadcast_sd(weights + k);
            acc0 = _mm256_fmadd_pd(w, _mm256_loadu_pd(x + k), acc0);
            acc1 = _mm256_fmadd_pd(w, _mm256_loadu_pd(x + k + 4), acc1);
        }
        _mm256_storeu_pd(out + i, acc0);
        _mm256_storeu_pd(out + i + 4, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        const double* x = input + i;
        for (std::size_t k = 0; k < taps; ++k) {
            acc = _mm256_fmadd_pd(_mm256_broadcast_sd(weights + k), _mm256_loadu_pd(x + k), acc);
        }
        _mm256_storeu_pd(out + i, acc);
    }
    for (; i < n; ++i) {
        const double* x = input + i;
        double acc = 0.0;
        for (std::size_t k = 0; k < taps; ++k) {
            acc = __builtin_fma(weights[k], x[k], acc);
        }
        out[i] = acc;
    }
}

#else

bool avx2_supported() { return false; }

void correlate_avx2(const double*, const double*, std::size_t, double*, std::size_t) {}

#endif

}  // namespace nlwave::simd::detail
