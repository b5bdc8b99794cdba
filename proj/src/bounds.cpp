#include "nlwave/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nlwave/errors.hpp"
#include "nlwave/numerics.hpp"

namespace nlwave {

std::string to_string(Regime regime) {
    return regime == Regime::Supercritical ? "supercritical" : "critical";
}

double supercritical_f(const BoundsBundle& b, double z) {
    return std::exp(-b.lambda1 * z) - b.q * std::exp(-b.mu * b.lambda1 * z);
}

double critical_g(const BoundsBundle& b, double z) {
    return (b.h * z - b.q * std::sqrt(std::max(z, 0.0))) * std::exp(-b.lambda1 * z);
}

std::vector<double> BoundsBundle::kinks() const {
    if (regime == Regime::Supercritical) {
        return {0.0, z1};
    }
    return {0.0, z2, z3, z4};
}

BoundValues BoundsBundle::eval(double z) const {
    BoundValues v;
    const double e1 = std::exp(-lambda1 * z);
    v.phi_bar = z <= 0.0 ? 1.0 - epsilon : 1.0 - epsilon * e1;
    if (regime == Regime::Supercritical) {
        v.phi_low = z <= 0.0 ? 0.5 : 1.0 - 0.5 * std::exp(-lambda0 * z);
        v.psi_bar = z <= 0.0 ? 1.0 : e1;
        v.psi_low = z <= z1 ? delta : supercritical_f(*this, z);
    } else {
        v.phi_low = z <= z3 ? 0.5 : 1.0 - 0.5 * std::exp(-lambda0 * (z - z3));
        v.psi_bar = z <= z2 ? 1.0 : h * z * e1;
        v.psi_low = z <= z4 ? delta : critical_g(*this, z);
    }
    return v;
}

BoundValues BoundsBundle::derivative(double z) const {
    BoundValues v;
    const double e1 = std::exp(-lambda1 * z);
    v.phi_bar = z < 0.0 ? 0.0 : epsilon * lambda1 * e1;
    if (regime == Regime::Supercritical) {
        v.phi_low = z < 0.0 ? 0.0 : 0.5 * lambda0 * std::exp(-lambda0 * z);
        v.psi_bar = z < 0.0 ? 0.0 : -lambda1 * e1;
        v.psi_low = z < z1 ? 0.0
                           : -lambda1 * e1 + q * mu * lambda1 * std::exp(-mu * lambda1 * z);
    } else {
        v.phi_low = z < z3 ? 0.0 : 0.5 * lambda0 * std::exp(-lambda0 * (z - z3));
        v.psi_bar = z < z2 ? 0.0 : h * e1 * (1.0 - lambda1 * z);
        v.psi_low = z < z4 ? 0.0
                           : e1 * (h - 0.5 * q / std::sqrt(z)) - lambda1 * critical_g(*this, z);
    }
    return v;
}

BoundValues eval_bundle(const BoundsBundle& bundle, double z) { return bundle.eval(z); }

namespace {

double require_speed(const ModelParams& params, const Kernel& k2, SpeedReport& speed) {
    speed = minimal_speed(params, k2);
    if (!speed.attained) {
        throw PreconditionError("the minimal speed is not attained for this predator kernel");
    }
    return speed.s_star;
}

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream os;
        os << "bounds construction produced a non-positive " << what << " (" << value << ")";
        throw NumericalFailure(os.str());
    }
}

}  // namespace

BoundsBundle construct_supercritical(const ModelParams& params, const Kernel& k1, const Kernel& k2,
                                     double s) {
    params.require_wave_hypotheses();
    SpeedReport speed;
    require_speed(params, k2, speed);
    const RootPair roots = a_roots(params, k2, s, speed);

    BoundsBundle b;
    b.regime = Regime::Supercritical;
    b.s = s;
    b.params = params;
    b.lambda1 = roots.lambda1;
    b.lambda2 = roots.lambda2;
    b.mu = 0.5 * (1.0 + std::min(roots.lambda2 / roots.lambda1, 2.0));

    const double a_mu = char_A(params, k2, b.mu * b.lambda1, s);
    if (!(a_mu < 0.0)) {
        throw NumericalFailure("A(mu lambda1) is not negative");
    }
    b.q = 2.0 * std::max(1.0, 2.0 * params.b / -a_mu);

    const double gap = (b.mu - 1.0) * b.lambda1;
    b.z0 = std::log(b.q) / gap;
    b.zM = std::log(b.q * b.mu) / gap;
    const double f_max = supercritical_f(b, b.zM);
    b.delta = 0.5 * std::min({f_max, params.a_star(), 0.5 * (1.0 - params.d / params.b)});
    require_positive(b.delta, "delta");

    b.z1 = numerics::bisect([&](double z) { return supercritical_f(b, z) - b.delta; }, b.z0, b.zM,
                            1e-16);
    const double growth = std::exp(gap * b.z1);
    b.epsilon = 0.5 * std::min(b.delta, (growth - b.q) / growth) / (1.0 + s * b.lambda1 + params.a);
    require_positive(b.epsilon, "epsilon");

    b.lambda0 = choose_lambda0(params, k1, s, b.lambda1);
    return b;
}

BoundsBundle construct_critical(const ModelParams& params, const Kernel& k1, const Kernel& k2) {
    params.require_wave_hypotheses();
    const auto support = k2.support_radius();
    if (!support) {
        throw PreconditionError("critical construction requires compact support of J2");
    }
    SpeedReport speed;
    const double s = require_speed(params, k2, speed);
    const double l1 = speed.lambda_star;
    const double identity = std::abs(params.d * mgf_d1(k2, l1) - s);
    if (identity > 1e-8) {
        std::ostringstream os;
        os << "double-root identity d I2'(lambda*) = s* fails by " << identity;
        throw NumericalFailure(os.str());
    }

    BoundsBundle b;
    b.regime = Regime::Critical;
    b.s = s;
    b.params = params;
    b.lambda1 = l1;
    b.lambda2 = l1;
    b.S = *support;

    // h: the two roots of h z e^{-l1 z} = 1 must be more than S apart
    b.h = 2.0 * l1 * std::numbers::e;
    for (int it = 0;; ++it) {
        if (it > 200) {
            throw NumericalFailure("could not separate the roots of h z exp(-lambda1 z) = 1");
        }
        auto eq = [&](double z) { return b.h * z * std::exp(-l1 * z) - 1.0; };
        b.z1 = numerics::bisect(eq, 0.0, 1.0 / l1, 1e-16);
        double hi = 2.0 / l1;
        while (eq(hi) > 0.0) {
            hi *= 2.0;
        }
        b.z2 = numerics::bisect(eq, 1.0 / l1, hi, 1e-16);
        if (b.z2 - b.z1 > b.S) {
            break;
        }
        b.h *= 2.0;
    }

    b.lambda0 = choose_lambda0(params, k1, s, l1);
    b.z3 = std::max(2.0 * b.z2, std::log(4.0 * b.h / (params.a * (l1 - b.lambda0) *
                                                       std::numbers::e)) /
                                    b.lambda0);

    // q: the bound 16 b h^2 w(z) / (d I2''(l1)) with w(z) = z^2 (z+S)^{3/2} e^{-l1 z}
    // is only needed for z > z4 > z0 = (q/h)^2, so the supremum is taken over
    // z >= z0. Increasing q moves z0 right and shrinks the supremum, so the
    // smallest admissible q is the crossing of q and 2 c sup w.
    const double c = 16.0 * params.b * b.h * b.h / (params.d * mgf_d2(k2, l1));
    const double shape = l1 * b.S - 3.5;
    const double w_peak = (-shape + std::sqrt(shape * shape + 8.0 * l1 * b.S)) / (2.0 * l1);
    auto w = [&](double z) { return z * z * std::pow(z + b.S, 1.5) * std::exp(-l1 * z); };
    auto excess = [&](double q) {
        const double z0 = (q / b.h) * (q / b.h);
        return q - 2.0 * c * w(std::max(z0, w_peak));
    };
    const double q_lo = 2.0 * b.h * std::sqrt(b.z2);  // z0 = 4 z2 > z2
    b.q = q_lo;
    if (excess(q_lo) < 0.0) {
        double q_hi = 2.0 * q_lo;
        for (int it = 0; excess(q_hi) < 0.0; ++it) {
            if (it > 200) {
                throw NumericalFailure("no admissible q for the critical construction");
            }
            q_hi *= 2.0;
        }
        b.q = numerics::bisect(excess, q_lo, q_hi, 1e-14);
        if (excess(b.q) < 0.0) {
            b.q = std::nextafter(b.q, numerics::infinity) * (1.0 + 1e-14);
        }
    }
    b.z0 = (b.q / b.h) * (b.q / b.h);

    auto g_slope = [&](double z) {
        return (b.h - 0.5 * b.q / std::sqrt(z)) - l1 * (b.h * z - b.q * std::sqrt(z));
    };
    double hi = b.z0 + 20.0 / l1;
    while (g_slope(hi) > 0.0) {
        hi += 20.0 / l1;
    }
    b.zM = numerics::bisect(g_slope, b.z0, hi, 1e-16);
    const double g_max = critical_g(b, b.zM);
    b.delta = 0.5 * std::min({g_max, params.a_star(), 0.5 * (1.0 - params.d / params.b)});
    require_positive(b.delta, "delta");

    b.z4 = numerics::bisect([&](double z) { return critical_g(b, z) - b.delta; }, b.z0, b.zM,
                            1e-16);
    b.epsilon = 0.5 * std::min(b.delta, b.h * b.z4 - b.q * std::sqrt(b.z4)) /
                (1.0 + s * l1 + params.a);
    require_positive(b.epsilon, "epsilon");
    return b;
}

namespace {

// N[f](z) = int J(y) [f(z - y) - f(z)] dy, split wherever J or y -> f(z - y)
// is not smooth.
template <class F>
double nonlocal(const Kernel& kernel, F&& f, double z, const std::vector<double>& kinks,
                double tol) {
    const double radius = kernel.effective_radius();
    std::vector<double> cuts{-radius, radius};
    for (double k : kernel.interior_kinks()) {
        if (k > -radius && k < radius) {
            cuts.push_back(k);
        }
    }
    for (double e : kinks) {
        const double y = z - e;
        if (y > -radius && y < radius) {
            cuts.push_back(y);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const double fz = f(z);
    const double piece_tol = tol / static_cast<double>(cuts.size() - 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i];
        const double hi = cuts[i + 1];
        if (hi - lo < 1e-14) {
            continue;
        }
        // nudge the evaluation point into the open piece so that one-sided
        // values of both J and f are used at the cuts
        const double pad = 1e-12 * std::max(1.0, hi - lo);
        auto integrand = [&](double y) {
            const double yy = std::clamp(y, lo + pad, hi - pad);
            return kernel(yy) * (f(z - yy) - fz);
        };
        total += numerics::adaptive_simpson(integrand, lo, hi, piece_tol, 40, 4);
    }
    return total;
}

}  // namespace

InequalityValues inequalities_at(const BoundsBundle& b, const Kernel& k1, const Kernel& k2,
                                 double z, double quad_tol) {
    const auto kinks = b.kinks();
    const BoundValues v = b.eval(z);
    const BoundValues dv = b.derivative(z);
    const double a = b.params.a;
    const double bb = b.params.b;
    const double d = b.params.d;
    const double s = b.s;

    const double n_phi_bar =
        nonlocal(k1, [&](double x) { return b.eval(x).phi_bar; }, z, kinks, quad_tol);
    const double n_phi_low =
        nonlocal(k1, [&](double x) { return b.eval(x).phi_low; }, z, kinks, quad_tol);
    const double n_psi_bar =
        nonlocal(k2, [&](double x) { return b.eval(x).psi_bar; }, z, kinks, quad_tol);
    const double n_psi_low =
        nonlocal(k2, [&](double x) { return b.eval(x).psi_low; }, z, kinks, quad_tol);

    InequalityValues r;
    r.u1 = n_phi_bar + s * dv.phi_bar + a * v.phi_bar * (1.0 - v.phi_bar) - v.psi_low;
    r.u2 = d * n_psi_bar + s * dv.psi_bar + bb * v.psi_bar * (1.0 - v.psi_bar / v.phi_bar);
    r.l1 = n_phi_low + s * dv.phi_low + a * v.phi_low * (1.0 - v.phi_low) - v.psi_bar;
    r.l2 = d * n_psi_low + s * dv.psi_low + bb * v.psi_low * (1.0 - v.psi_low / v.phi_low);
    return r;
}

VerificationReport verify(const BoundsBundle& bundle, const Kernel& k1, const Kernel& k2,
                          const VerifyOptions& options) {
    if (!(options.kink_radius > 0.0) || options.grid_n < 2 || !(options.grid_span > 0.0)) {
        throw std::invalid_argument("verify: need grid_n >= 2, grid_span > 0, kink_radius > 0");
    }
    VerificationReport report;
    report.tol = options.tol;
    const double inf = numerics::infinity;
    report.max_u1.value = -inf;
    report.max_u2.value = -inf;
    report.min_l1.value = inf;
    report.min_l2.value = inf;

    const auto kinks = bundle.kinks();
    const double span = options.grid_span;
    const std::size_t n = options.grid_n;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = -span + 2.0 * span * static_cast<double>(i) / static_cast<double>(n - 1);
        const BoundValues v = bundle.eval(z);
        if (v.phi_low > v.phi_bar || v.psi_low > v.psi_bar) {
            report.ordered = false;
        }
        const bool near_kink = std::any_of(kinks.begin(), kinks.end(), [&](double e) {
            return std::abs(z - e) <= options.kink_radius;
        });
        if (near_kink) {
            continue;
        }
        const InequalityValues r = inequalities_at(bundle, k1, k2, z, options.quad_tol);
        ++report.points_checked;
        if (r.u1 > report.max_u1.value) report.max_u1 = {r.u1, z};
        if (r.u2 > report.max_u2.value) report.max_u2 = {r.u2, z};
        if (r.l1 < report.min_l1.value) report.min_l1 = {r.l1, z};
        if (r.l2 < report.min_l2.value) report.min_l2 = {r.l2, z};
        if (r.u1 > options.tol) report.u1_violations.add(z);
        if (r.u2 > options.tol) report.u2_violations.add(z);
        if (r.l1 < -options.tol) report.l1_violations.add(z);
        if (r.l2 < -options.tol) report.l2_violations.add(z);
    }
    const double tol = options.tol;
    report.pass = report.ordered && report.max_u1.value <= tol && report.max_u2.value <= tol &&
                  report.min_l1.value >= -tol && report.min_l2.value >= -tol;
    return report;
}

}  // namespace nlwave
