#pragma once

// Discrete nonlocal dispersal: samples of (J * f)(x_i) = int J(y) f(x_i - y) dy
// on a uniform grid. The kernel is integrated with composite trapezoid weights
// carrying fourth-order Gregory end corrections on every smooth piece of J
// (pieces end at the support edge, at interior kinks and at the truncation
// radius). Weights are renormalised to unit sum so that constants are
// reproduced exactly.

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nlwave/grid.hpp"
#include "nlwave/kernels.hpp"

namespace nlwave {

struct Stencil {
    double h = 0.0;
    std::size_t half_width = 0;    ///< m: nodes y_j = j*h for |j| <= m
    std::vector<double> weights;   ///< size 2m+1, weights[j + m] for y_j
    double raw_mass = 1.0;         ///< sum of weights before renormalisation
    std::vector<std::string> warnings;
};

Stencil make_stencil(const Kernel& kernel, double h);

/// Values beyond the grid are the given constants.
struct ConstantTails {
    double left = 0.0;
    double right = 0.0;
};
/// f is extended periodically with period n*h.
struct Periodic {};
/// f(x) outside the grid is given by an explicit function of x.
struct FunctionTails {
    std::function<double(double)> value;
};
using Extension = std::variant<ConstantTails, Periodic, FunctionTails>;

struct ConvolutionResult {
    std::vector<double> values;
    std::vector<std::string> warnings;
};

ConvolutionResult convolve(const Kernel& kernel, const UniformGrid& grid, std::span<const double> f,
                           const Extension& extension);

/// Reusable convolution for a fixed kernel and spacing. Owns a scratch buffer,
/// so one instance must not be shared between threads.
class Convolver {
public:
    Convolver(const Kernel& kernel, double h);

    const Stencil& stencil() const { return stencil_; }
    std::size_t halo() const { return stencil_.half_width; }

    /// left_ghost holds f at x_{-m}..x_{-1}, right_ghost f at x_n..x_{n+m-1}.
    void apply(std::span<const double> f, std::span<const double> left_ghost,
               std::span<const double> right_ghost, std::span<double> out);

    void apply_constant(std::span<const double> f, double left, double right,
                        std::span<double> out);

private:
    Stencil stencil_;
    std::vector<double> padded_;
};

}  // namespace nlwave
