#include "nlwave/simd.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace nlwave::simd::detail {

#if defined(__aarch64__)

bool neon_supported() { return true; }

void correlate_neon(const double* input, const double* weights, std::size_t taps, double* out,
                    std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float64x2_t acc0 = vdupq_n_f64(0.0);
        float64x2_t acc1 = vdupq_n_f64(0.0);
        const double* x = input + i;
        for (std::size_t k = 0; k < taps; ++k) {
            const float64x2_t w = vdupq_n_f64(weights[k]);
            acc0 = vfmaq_f64(acc0, w, vld1q_f64(x + k));
            acc1 = vfmaq_f64(acc1, w, vld1q_f64(x + k + 2));
        }
        vst1q_f64(out + i, acc0);
        vst1q_f64(out + i + 2, acc1);
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

bool neon_supported() { return false; }

void correlate_neon(const double*, const double*, std::size_t, double*, std::size_t) {}

#endif

}  // namespace nlwave::simd::detail
