#include "nlwave/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nlwave/simd.hpp"

namespace nlwave {

namespace {

// Fourth-order Gregory end corrections to the trapezoid rule.
constexpr double kGregory[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};

double node_factor(long j, long lo, long hi) {
    const long n = hi - lo;
    if (n < 6) {
        return (j == lo || j == hi) ? 0.5 : 1.0;
    }
    const long from_edge = std::min(j - lo, hi - j);
    return from_edge < 3 ? kGregory[from_edge] : 1.0;
}

bool is_multiple(double value, double h, long& m) {
    const double ratio = value / h;
    const double r = std::round(ratio);
    m = static_cast<long>(r);
    return std::abs(ratio - r) <= 1e-9 * std::max(1.0, ratio);
}

}  // namespace

Stencil make_stencil(const Kernel& kernel, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw std::invalid_argument("stencil: grid spacing must be positive");
    }
    Stencil st;
    st.h = h;

    long m = 0;
    double edge = 0.0;  // abscissa at which the outer nodes evaluate J
    if (const auto support = kernel.support_radius()) {
        edge = *support;
        if (!is_multiple(edge, h, m)) {
            m = static_cast<long>(std::floor(edge / h));
            if (kernel.discontinuous_at_support_edge()) {
                std::ostringstream os;
                os << "support radius " << edge << " is not a multiple of h=" << h
                   << "; the jump at the support edge is integrated to first order only";
                st.warnings.push_back(os.str());
            }
            edge = static_cast<double>(m) * h;
        }
    } else {
        const double radius = kernel.effective_radius();
        m = static_cast<long>(std::ceil(radius / h - 1e-9));
        edge = static_cast<double>(m) * h;
    }
    if (m < 1) {
        m = 1;
        edge = h;
    }
    if (h > kernel.length_scale()) {
        std::ostringstream os;
        os << "grid spacing h=" << h << " is coarser than the kernel scale "
           << kernel.length_scale();
        st.warnings.push_back(os.str());
    }

    std::vector<long> cuts{-m};
    for (double k : kernel.interior_kinks()) {
        long idx = 0;
        if (kernel.family() != KernelFamily::Tabulated && is_multiple(k, h, idx) && idx > -m &&
            idx < m) {
            cuts.push_back(idx);
        }
    }
    cuts.push_back(m);
    std::sort(cuts.begin(), cuts.end());

    st.half_width = static_cast<std::size_t>(m);
    st.weights.assign(static_cast<std::size_t>(2 * m + 1), 0.0);
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const long lo = cuts[p];
        const long hi = cuts[p + 1];
        for (long j = lo; j <= hi; ++j) {
            double y = static_cast<double>(j) * h;
            if (j == -m) {
                y = -edge;
            } else if (j == m) {
                y = edge;
            }
            // one-sided value at a kink: J is continuous there for every family
            st.weights[static_cast<std::size_t>(j + m)] += h * node_factor(j, lo, hi) * kernel(y);
        }
    }
    for (long j = 1; j <= m; ++j) {
        const double avg = 0.5 * (st.weights[static_cast<std::size_t>(m + j)] +
                                  st.weights[static_cast<std::size_t>(m - j)]);
        st.weights[static_cast<std::size_t>(m + j)] = avg;
        st.weights[static_cast<std::size_t>(m - j)] = avg;
    }
    double mass = 0.0;
    for (double w : st.weights) {
        mass += w;
    }
    st.raw_mass = mass;
    for (double& w : st.weights) {
        w /= mass;
    }
    return st;
}

Convolver::Convolver(const Kernel& kernel, double h) : stencil_(make_stencil(kernel, h)) {}

void Convolver::apply(std::span<const double> f, std::span<const double> left_ghost,
                      std::span<const double> right_ghost, std::span<double> out) {
    const std::size_t m = stencil_.half_width;
    if (left_ghost.size() != m || right_ghost.size() != m || out.size() != f.size()) {
        throw std::invalid_argument("Convolver::apply: ghost or output size mismatch");
    }
    padded_.resize(f.size() + 2 * m);
    std::copy(left_ghost.begin(), left_ghost.end(), padded_.begin());
    std::copy(f.begin(), f.end(), padded_.begin() + static_cast<std::ptrdiff_t>(m));
    std::copy(right_ghost.begin(), right_ghost.end(),
              padded_.begin() + static_cast<std::ptrdiff_t>(m + f.size()));
    simd::correlate(padded_, stencil_.weights, out);
}

void Convolver::apply_constant(std::span<const double> f, double left, double right,
                               std::span<double> out) {
    const std::size_t m = stencil_.half_width;
    padded_.resize(f.size() + 2 * m);
    std::fill(padded_.begin(), padded_.begin() + static_cast<std::ptrdiff_t>(m), left);
    std::copy(f.begin(), f.end(), padded_.begin() + static_cast<std::ptrdiff_t>(m));
    std::fill(padded_.begin() + static_cast<std::ptrdiff_t>(m + f.size()), padded_.end(), right);
    simd::correlate(padded_, stencil_.weights, out);
}

ConvolutionResult convolve(const Kernel& kernel, const UniformGrid& grid, std::span<const double> f,
                           const Extension& extension) {
    if (f.size() != grid.n || grid.n == 0) {
        throw std::invalid_argument("convolve: sample count does not match grid");
    }
    Convolver conv(kernel, grid.h);
    const std::size_t m = conv.halo();
    const std::size_t n = grid.n;
    std::vector<double> left(m);
    std::vector<double> right(m);
    std::visit(
        [&](const auto& ext) {
            using T = std::decay_t<decltype(ext)>;
            for (std::size_t k = 0; k < m; ++k) {
                const long il = static_cast<long>(k) - static_cast<long>(m);  // x_{-m+k}
                const long ir = static_cast<long>(n + k);
                if constexpr (std::is_same_v<T, ConstantTails>) {
                    left[k] = ext.left;
                    right[k] = ext.right;
                } else if constexpr (std::is_same_v<T, Periodic>) {
                    const long nn = static_cast<long>(n);
                    left[k] = f[static_cast<std::size_t>(((il % nn) + nn) % nn)];
                    right[k] = f[static_cast<std::size_t>(ir % nn)];
                } else {
                    left[k] = ext.value(grid.x0 + static_cast<double>(il) * grid.h);
                    right[k] = ext.value(grid.x0 + static_cast<double>(ir) * grid.h);
                }
            }
        },
        extension);
    ConvolutionResult result;
    result.values.resize(n);
    conv.apply(f, left, right, result.values);
    result.warnings = conv.stencil().warnings;
    return result;
}

}  // namespace nlwave
