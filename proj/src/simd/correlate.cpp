#include "nlwave/simd.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace nlwave::simd {

namespace detail {

void correlate_scalar(const double* input, const double* weights, std::size_t taps, double* out,
                      std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* x = input + i;
        double acc = 0.0;
        for (std::size_t k = 0; k < taps; ++k) {
            acc += weights[k] * x[k];
        }
        out[i] = acc;
    }
}

}  // namespace detail

std::string_view name(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return "scalar";
        case Isa::Avx2:
            return "avx2";
        case Isa::Neon:
            return "neon";
    }
    return "unknown";
}

std::vector<Isa> available() {
    std::vector<Isa> out{Isa::Scalar};
    if (detail::avx2_supported()) {
        out.push_back(Isa::Avx2);
    }
    if (detail::neon_supported()) {
        out.push_back(Isa::Neon);
    }
    return out;
}

namespace {

Isa select() {
    if (const char* env = std::getenv("NLWAVE_SIMD"); env != nullptr && std::string(env) == "scalar") {
        return Isa::Scalar;
    }
    if (detail::avx2_supported()) {
        return Isa::Avx2;
    }
    if (detail::neon_supported()) {
        return Isa::Neon;
    }
    return Isa::Scalar;
}

void check_sizes(std::span<const double> input, std::span<const double> weights,
                 std::span<double> out) {
    if (weights.empty()) {
        throw std::invalid_argument("correlate: empty weight vector");
    }
    if (input.size() + 1 < out.size() + weights.size()) {
        throw std::invalid_argument("correlate: input shorter than out.size() + taps - 1");
    }
}

}  // namespace

Isa active() {
    static const Isa chosen = select();
    return chosen;
}

void correlate_with(Isa isa, std::span<const double> input, std::span<const double> weights,
                    std::span<double> out) {
    check_sizes(input, weights, out);
    switch (isa) {
        case Isa::Scalar:
            detail::correlate_scalar(input.data(), weights.data(), weights.size(), out.data(),
                                     out.size());
            return;
        case Isa::Avx2:
            if (!detail::avx2_supported()) {
                break;
            }
            detail::correlate_avx2(input.data(), weights.data(), weights.size(), out.data(),
                                   out.size());
            return;
        case Isa::Neon:
            if (!detail::neon_supported()) {
                break;
            }
            detail::correlate_neon(input.data(), weights.data(), weights.size(), out.data(),
                                   out.size());
            return;
    }
    throw std::invalid_argument("correlate: variant " + std::string(name(isa)) +
                                " is not available on this machine");
}

void correlate(std::span<const double> input, std::span<const double> weights,
               std::span<double> out) {
    correlate_with(active(), input, weights, out);
}

}  // namespace nlwave::simd
