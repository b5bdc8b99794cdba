#include "nlwave/wave.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <sstream>

#include "nlwave/convolution.hpp"
#include "nlwave/numerics.hpp"

namespace nlwave {

namespace {

// Five-point centred first derivative.
constexpr double kD4[5] = {1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0};

// beta I - s D on n unknowns: a pentadiagonal matrix whose symmetric part is
// beta I, so elimination without pivoting is safe.
class ShiftedDerivative {
public:
    ShiftedDerivative(std::size_t n, double beta, double s, double h) : n_(n) {
        for (int k = 0; k < 5; ++k) {
            coef_[k] = -s * kD4[k] / h;
        }
        coef_[2] += beta;
        // band_[i][j] holds A(i, i + j - 2)
        band_.assign(n, {0.0, 0.0, 0.0, 0.0, 0.0});
        for (std::size_t i = 0; i < n; ++i) {
            for (int k = 0; k < 5; ++k) {
                band_[i][k] = coef_[k];
            }
        }
        lower_.assign(n, {0.0, 0.0});
        for (std::size_t k = 0; k < n; ++k) {
            const double pivot = band_[k][2];
            for (std::size_t r = 1; r <= 2 && k + r < n; ++r) {
                const std::size_t i = k + r;
                const double l = band_[i][2 - r] / pivot;
                lower_[i][2 - r] = l;
                band_[i][2 - r] = 0.0;
                for (std::size_t c = 1; c <= 2 && k + c < n; ++c) {
                    // A(i, k + c) -= l A(k, k + c)
                    band_[i][2 - r + c] -= l * band_[k][2 + c];
                }
            }
        }
    }

    /// Coefficient of u_{i+k-2} in row i.
    double coefficient(int k) const { return coef_[k]; }

    void solve(std::vector<double>& x) const {
        for (std::size_t i = 0; i < n_; ++i) {
            if (i >= 1) x[i] -= lower_[i][1] * x[i - 1];
            if (i >= 2) x[i] -= lower_[i][0] * x[i - 2];
        }
        for (std::size_t ii = n_; ii-- > 0;) {
            double v = x[ii];
            if (ii + 1 < n_) v -= band_[ii][3] * x[ii + 1];
            if (ii + 2 < n_) v -= band_[ii][4] * x[ii + 2];
            x[ii] = v / band_[ii][2];
        }
    }

private:
    std::size_t n_;
    double coef_[5] = {};
    std::vector<std::array<double, 5>> band_;
    std::vector<std::array<double, 2>> lower_;
};

struct Ghosts {
    std::vector<double> left;
    std::vector<double> right;
};

// Ghost samples x_{-m}..x_{-1} (left value constant) and x_n..x_{n+m-1}.
template <class F>
Ghosts make_ghosts(const UniformGrid& grid, std::size_t m, double left, F&& right) {
    Ghosts g;
    g.left.assign(m, left);
    g.right.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        g.right[k] = right(grid.x0 + static_cast<double>(grid.n + k) * grid.h);
    }
    return g;
}

double sup_interior(const std::vector<double>& r, std::size_t edge) {
    double worst = 0.0;
    for (std::size_t i = edge; i + edge < r.size(); ++i) {
        worst = std::max(worst, std::abs(r[i]));
    }
    return worst;
}

}  // namespace

WaveProfile solve(const ModelParams& params, const Kernel& k1, const Kernel& k2,
                  const BoundsBundle& bundle, const SolveOptions& options) {
    params.validate();
    if (!(bundle.params == params)) {
        throw PreconditionError("wave solve: bundle was built for different model parameters");
    }
    if (options.n < 2000) {
        throw PreconditionError("wave solve: need at least 2000 grid intervals");
    }
    if (!(options.L > 0.0) || !(options.tol > 0.0) || !(options.damping > 0.0) ||
        options.damping > 1.0) {
        throw std::invalid_argument("wave solve: L, tol must be positive and damping in (0, 1]");
    }
    const double shift = options.shift;
    auto box = [&](double x) { return bundle.eval(x - shift); };
    {
        const BoundValues right = box(options.L + shift);
        const double tail = std::max({1.0 - right.phi_bar, 1.0 - right.phi_low, right.psi_bar});
        if (tail > 1e-6) {
            std::ostringstream os;
            os << "wave solve: L = " << options.L
               << " is too short, the bounds are still " << tail << " from their limits";
            throw PreconditionError(os.str());
        }
    }

    const double a = params.a;
    const double b = params.b;
    const double d = params.d;
    const double s = bundle.s;
    const double a_star = params.a_star();
    const double beta = 1.0 + a + 2.0 * b + d;

    WaveProfile prof;
    prof.s = s;
    prof.params = params;
    prof.regime = bundle.regime;
    prof.lambda1 = bundle.lambda1;
    prof.shift = shift;
    prof.beta = beta;
    prof.grid = UniformGrid::spanning(-options.L + shift, options.L + shift, options.n);
    const UniformGrid& grid = prof.grid;
    const std::size_t n = grid.n;

    std::vector<double> lo_phi(n), hi_phi(n), lo_psi(n), hi_psi(n);
    for (std::size_t i = 0; i < n; ++i) {
        const BoundValues v = box(grid.x(i));
        lo_phi[i] = v.phi_low;
        hi_phi[i] = v.phi_bar;
        lo_psi[i] = v.psi_low;
        hi_psi[i] = v.psi_bar;
    }

    // initial guess: a logistic switch between the two states, clipped
    prof.phi.resize(n);
    prof.psi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double sw = 1.0 / (1.0 + std::exp(-bundle.lambda1 * (grid.x(i) - shift)));
        prof.phi[i] = std::clamp(a_star + (1.0 - a_star) * sw, lo_phi[i], hi_phi[i]);
        prof.psi[i] = std::clamp(a_star * (1.0 - sw), lo_psi[i], hi_psi[i]);
    }

    Convolver c1(k1, grid.h);
    Convolver c2(k2, grid.h);
    const Ghosts g1 = make_ghosts(grid, c1.halo(), a_star, [&](double x) { return box(x).phi_bar; });
    const Ghosts g2 = make_ghosts(grid, c2.halo(), a_star, [&](double x) { return box(x).psi_bar; });
    const Ghosts d1 = make_ghosts(grid, 2, a_star, [&](double x) { return box(x).phi_bar; });
    const Ghosts d2 = make_ghosts(grid, 2, a_star, [&](double x) { return box(x).psi_bar; });

    const ShiftedDerivative op(n, beta, s, grid.h);
    // contributions of the derivative ghosts to the first and last two rows
    auto add_ghosts = [&](std::vector<double>& rhs, const Ghosts& g, double sign) {
        const double c0 = op.coefficient(0);
        const double c1_ = op.coefficient(1);
        const double c3 = op.coefficient(3);
        const double c4 = op.coefficient(4);
        rhs[0] += sign * (c0 * g.left[0] + c1_ * g.left[1]);
        rhs[1] += sign * c0 * g.left[1];
        rhs[n - 2] += sign * c4 * g.right[0];
        rhs[n - 1] += sign * (c3 * g.right[0] + c4 * g.right[1]);
    };
    // y = (beta - s D) u including ghosts
    auto apply_op = [&](const std::vector<double>& u, const Ghosts& g, std::vector<double>& y) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int k = 0; k < 5; ++k) {
                const long j = static_cast<long>(i) + k - 2;
                double uj;
                if (j < 0) {
                    uj = g.left[static_cast<std::size_t>(j + 2)];
                } else if (j >= static_cast<long>(n)) {
                    uj = g.right[static_cast<std::size_t>(j - static_cast<long>(n))];
                } else {
                    uj = u[static_cast<std::size_t>(j)];
                }
                acc += op.coefficient(k) * uj;
            }
            y[i] = acc;
        }
    };

    std::vector<double> conv1(n), conv2(n), h1(n), h2(n), tmp(n), u1(n), u2(n);
    const std::size_t edge = 5;
    double best_res = numerics::infinity;
    WaveProfile best = prof;
    const double omega = options.damping;

    for (std::size_t it = 1; it <= options.max_iter; ++it) {
        c1.apply(prof.phi, g1.left, g1.right, conv1);
        c2.apply(prof.psi, g2.left, g2.right, conv2);
        for (std::size_t i = 0; i < n; ++i) {
            const double p = prof.phi[i];
            const double q = prof.psi[i];
            h1[i] = conv1[i] - p + beta * p + a * p * (1.0 - p) - q;
            h2[i] = d * (conv2[i] - q) + beta * q + b * q * (1.0 - q / p);
        }

        // residual of the current iterate: H - (beta - s D) u
        apply_op(prof.phi, d1, tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = h1[i] - tmp[i];
        const double r1 = sup_interior(tmp, edge);
        apply_op(prof.psi, d2, tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = h2[i] - tmp[i];
        const double r2 = sup_interior(tmp, edge);
        if (std::max(r1, r2) < best_res) {
            best_res = std::max(r1, r2);
            best.phi = prof.phi;
            best.psi = prof.psi;
            best.residual = {r1, r2};
            best.iterations = it - 1;
        }

        u1 = h1;
        add_ghosts(u1, d1, -1.0);
        op.solve(u1);
        u2 = h2;
        add_ghosts(u2, d2, -1.0);
        op.solve(u2);

        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double np = std::clamp((1.0 - omega) * prof.phi[i] + omega * u1[i], lo_phi[i],
                                         hi_phi[i]);
            const double nq = std::clamp((1.0 - omega) * prof.psi[i] + omega * u2[i], lo_psi[i],
                                         hi_psi[i]);
            change = std::max({change, std::abs(np - prof.phi[i]), std::abs(nq - prof.psi[i])});
            prof.phi[i] = np;
            prof.psi[i] = nq;
        }
        prof.iterations = it;
        prof.last_change = change;
        if (options.monitor) {
            options.monitor(it, std::max(r1, r2), change);
        }

        if (change < 0.1 * options.tol && std::max(r1, r2) < options.tol) {
            prof.residual = residual(prof, k1, k2, edge);
            if (prof.residual.max() < options.tol) {
                prof.converged = true;
                prof.sandwiched = in_sandwich(prof, bundle);
                return prof;
            }
        }
    }

    best.converged = false;
    best.last_change = prof.last_change;
    best.sandwiched = in_sandwich(best, bundle);
    best.residual = residual(best, k1, k2, edge);
    std::ostringstream os;
    os << "wave solve: no convergence after " << options.max_iter
       << " sweeps; best residual (" << best.residual.phi << ", " << best.residual.psi << ")";
    throw WaveNonConvergence(os.str(), std::move(best));
}

ResidualPair residual(const WaveProfile& profile, const Kernel& k1, const Kernel& k2,
                      std::size_t edge) {
    const auto& grid = profile.grid;
    const std::size_t n = grid.n;
    if (profile.phi.size() != n || profile.psi.size() != n || n < 2 * edge + 1 || edge < 2) {
        throw std::invalid_argument("residual: profile size does not match its grid");
    }
    const auto& p = profile.params;
    Convolver c1(k1, grid.h);
    Convolver c2(k2, grid.h);
    std::vector<double> conv1(n), conv2(n);
    c1.apply_constant(profile.phi, profile.phi.front(), profile.phi.back(), conv1);
    c2.apply_constant(profile.psi, profile.psi.front(), profile.psi.back(), conv2);

    ResidualPair r;
    const double s = profile.s;
    for (std::size_t i = edge; i + edge < n; ++i) {
        double dphi = 0.0;
        double dpsi = 0.0;
        for (int k = 0; k < 5; ++k) {
            const std::size_t j = i + static_cast<std::size_t>(k) - 2;
            dphi += kD4[k] * profile.phi[j];
            dpsi += kD4[k] * profile.psi[j];
        }
        dphi /= grid.h;
        dpsi /= grid.h;
        const double ph = profile.phi[i];
        const double ps = profile.psi[i];
        const double e1 = (conv1[i] - ph) + s * dphi + p.a * ph * (1.0 - ph) - ps;
        const double e2 = p.d * (conv2[i] - ps) + s * dpsi + p.b * ps * (1.0 - ps / ph);
        r.phi = std::max(r.phi, std::abs(e1));
        r.psi = std::max(r.psi, std::abs(e2));
    }
    return r;
}

bool in_sandwich(const WaveProfile& profile, const BoundsBundle& bundle, double slack) {
    for (std::size_t i = 0; i < profile.grid.n; ++i) {
        const BoundValues v = bundle.eval(profile.grid.x(i) - profile.shift);
        if (profile.phi[i] < v.phi_low - slack || profile.phi[i] > v.phi_bar + slack ||
            profile.psi[i] < v.psi_low - slack || profile.psi[i] > v.psi_bar + slack) {
            return false;
        }
    }
    return true;
}

TailReport tail_check(const WaveProfile& profile, double tol) {
    TailReport t;
    t.tol = tol;
    const std::size_t n = profile.grid.n;
    const std::size_t w = std::max<std::size_t>(1, n / 10);
    const double a_star = profile.params.a_star();
    const double a = profile.params.a;

    auto left_phi = std::span(profile.phi).first(w);
    auto left_psi = std::span(profile.psi).first(w);
    auto right_phi = std::span(profile.phi).last(w);
    auto right_psi = std::span(profile.psi).last(w);

    t.phi_minus = *std::min_element(left_phi.begin(), left_phi.end());
    t.phi_plus = *std::max_element(left_phi.begin(), left_phi.end());
    t.psi_minus = *std::min_element(left_psi.begin(), left_psi.end());
    t.psi_plus = *std::max_element(left_psi.begin(), left_psi.end());
    t.right_phi_min = *std::min_element(right_phi.begin(), right_phi.end());
    t.right_phi_max = *std::max_element(right_phi.begin(), right_phi.end());
    t.right_psi_max = *std::max_element(right_psi.begin(), right_psi.end());

    t.left_gap = std::max(std::abs(t.phi_minus - a_star), std::abs(t.phi_plus - a_star)) +
                 std::max(std::abs(t.psi_minus - a_star), std::abs(t.psi_plus - a_star));
    t.right_gap = std::max(std::abs(1.0 - t.right_phi_min), std::abs(1.0 - t.right_phi_max)) +
                  std::abs(t.right_psi_max);

    t.ordered = 0.5 < t.phi_minus && t.phi_minus <= t.psi_minus + tol &&
                t.psi_minus <= t.psi_plus && t.psi_plus <= t.phi_plus + tol && t.phi_plus < 1.0;
    t.prey_lower_ok = a * t.phi_minus * (1.0 - t.phi_minus) <= t.psi_plus + tol;
    t.prey_upper_ok = a * t.phi_plus * (1.0 - t.phi_plus) >= t.psi_minus - tol;
    if (!t.ordered) {
        t.failures.push_back("left-tail ordering 1/2 < phi- <= psi- <= psi+ <= phi+ < 1 violated");
    }
    if (!t.prey_lower_ok) {
        t.failures.push_back("a phi-(1 - phi-) <= psi+ violated");
    }
    if (!t.prey_upper_ok) {
        t.failures.push_back("a phi+(1 - phi+) >= psi- violated");
    }
    return t;
}

}  // namespace nlwave
