#pragma once

// Sliding dot product used by every discrete convolution:
//
//   out[i] = sum_{k=0}^{taps-1} weights[k] * input[i + k],   i = 0..out.size()-1
//
// A scalar reference kernel is always available. Vector variants (AVX2+FMA on
// x86-64, NEON on AArch64) are selected once at runtime from CPU features; the
// environment variable NLWAVE_SIMD=scalar forces the reference path.

#include <span>
#include <string_view>
#include <vector>

namespace nlwave::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view name(Isa isa);

/// Variants compiled into this binary and supported by the running CPU.
std::vector<Isa> available();

/// The variant `correlate` dispatches to.
Isa active();

/// Requires input.size() >= out.size() + weights.size() - 1.
void correlate(std::span<const double> input, std::span<const double> weights,
               std::span<double> out);

/// Runs a specific variant. Throws std::invalid_argument if `isa` is not in
/// available().
void correlate_with(Isa isa, std::span<const double> input, std::span<const double> weights,
                    std::span<double> out);

namespace detail {
void correlate_scalar(const double* input, const double* weights, std::size_t taps, double* out,
                      std::size_t n);
bool avx2_supported();
void correlate_avx2(const double* input, const double* weights, std::size_t taps, double* out,
                    std::size_t n);
bool neon_supported();
void correlate_neon(const double* input, const double* weights, std::size_t taps, double* out,
                    std::size_t n);
}  // namespace detail

}  // namespace nlwave::simd
