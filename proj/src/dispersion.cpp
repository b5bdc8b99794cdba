#include "nlwave/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nlwave/errors.hpp"
#include "nlwave/numerics.hpp"

namespace nlwave {

void ModelParams::validate() const {
    auto check = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("model parameter ") + name +
                                        " must be finite and positive");
        }
    };
    check(a, "a");
    check(b, "b");
    check(d, "d");
}

void ModelParams::require_wave_hypotheses() const {
    validate();
    if (a < 4.0) {
        std::ostringstream os;
        os << "upper/lower solution construction requires a >= 4 (got a = " << a << ")";
        throw PreconditionError(os.str());
    }
    if (!(d < b)) {
        std::ostringstream os;
        os << "upper/lower solution construction requires d < b (got d = " << d << ", b = " << b
           << ")";
        throw PreconditionError(os.str());
    }
}

double char_A(const ModelParams& params, const Kernel& k2, double lambda, double s) {
    if (lambda < 0.0) {
        throw DomainError("char_A: lambda must be nonnegative");
    }
    return params.d * (mgf(k2, lambda) - 1.0) - s * lambda + params.b;
}

double char_B(const ModelParams& params, const Kernel& k1, double lambda, double s) {
    (void)params;
    if (lambda < 0.0) {
        throw DomainError("char_B: lambda must be nonnegative");
    }
    return (mgf(k1, lambda) - 1.0) - s * lambda;
}

double speed_objective(const ModelParams& params, const Kernel& k2, double lambda) {
    return (params.d * (mgf(k2, lambda) - 1.0) + params.b) / lambda;
}

namespace {

double probe_ceiling(const Kernel& k2) {
    if (std::isfinite(k2.lambda_hat())) {
        return 0.999 * k2.lambda_hat();
    }
    return 50.0 / k2.effective_radius();
}

}  // namespace

SpeedReport minimal_speed(const ModelParams& params, const Kernel& k2) {
    params.validate();
    SpeedReport report;
    const double ceiling = probe_ceiling(k2);
    auto F = [&](double lambda) { return speed_objective(params, k2, lambda); };

    std::vector<double> probes;
    for (double lambda = 1e-3; lambda < ceiling; lambda *= 2.0) {
        probes.push_back(lambda);
    }
    probes.push_back(ceiling);
    for (double lambda : probes) {
        report.objective_samples.emplace_back(lambda, F(lambda));
    }
    const auto best = std::min_element(
        report.objective_samples.begin(), report.objective_samples.end(),
        [](const auto& x, const auto& y) { return x.second < y.second; });
    const std::size_t idx = static_cast<std::size_t>(best - report.objective_samples.begin());

    if (idx + 1 == probes.size()) {
        // F still decreasing at the end of the probe range
        report.attained = false;
        report.lambda_star = probes.back();
        report.s_star = best->second;
        report.bracket_lo = probes[idx > 0 ? idx - 1 : 0];
        report.bracket_hi = probes.back();
        return report;
    }
    const double lo = probes[idx > 0 ? idx - 1 : 0];
    const double hi = probes[idx + 1];
    report.bracket_lo = lo;
    report.bracket_hi = hi;

    double lambda = numerics::golden_section_min(F, lo, hi, 1e-10);

    // F is flat at its minimum, so comparisons of F alone cannot place lambda*
    // better than ~sqrt(eps). Polish on the sign change of
    // G(lambda) = lambda^2 F'(lambda) = d lambda I2'(lambda) - d [I2(lambda) - 1] - b,
    // which is strictly increasing.
    auto G = [&](double l) {
        return params.d * l * mgf_d1(k2, l) - params.d * (mgf(k2, l) - 1.0) - params.b;
    };
    for (double width : {1e-6, 1e-4, 1e-2}) {
        const double a = std::max(lo, lambda * (1.0 - width));
        const double b = std::min(hi, lambda * (1.0 + width));
        if (G(a) < 0.0 && G(b) > 0.0) {
            lambda = numerics::bisect(G, a, b, 1e-16);
            break;
        }
    }
    report.attained = true;
    report.lambda_star = lambda;
    report.s_star = F(lambda);
    report.objective_samples.emplace_back(lambda, report.s_star);
    std::sort(report.objective_samples.begin(), report.objective_samples.end());
    return report;
}

bool is_critical(double s, double s_star) { return std::abs(s - s_star) <= 1e-12 * s_star; }

RootPair a_roots(const ModelParams& params, const Kernel& k2, double s) {
    return a_roots(params, k2, s, minimal_speed(params, k2));
}

RootPair a_roots(const ModelParams& params, const Kernel& k2, double s, const SpeedReport& speed) {
    if (!speed.attained) {
        throw PreconditionError("a_roots: the minimal speed is not attained for this kernel");
    }
    if (!(s > speed.s_star * (1.0 + 1e-12))) {
        std::ostringstream os;
        os.precision(17);
        os << "A(lambda; s) has two positive roots only for s > s* = " << speed.s_star
           << " (got s = " << s << "); use minimal_speed for the critical case";
        throw PreconditionError(os.str());
    }
    auto A = [&](double lambda) { return char_A(params, k2, lambda, s); };
    const double lstar = speed.lambda_star;

    RootPair roots;
    roots.s = s;
    roots.lambda1 = numerics::bisect(A, 0.0, lstar, 1e-15);

    double upper = 0.0;
    const double lhat = k2.lambda_hat();
    if (std::isfinite(lhat)) {
        for (int k = 1; k < 200; ++k) {
            upper = lhat - (lhat - lstar) * std::ldexp(1.0, -k);
            if (A(upper) > 0.0) {
                break;
            }
        }
    } else {
        upper = lstar;
        for (int k = 0; k < 200 && A(upper) <= 0.0; ++k) {
            upper *= 2.0;
        }
    }
    if (!(A(upper) > 0.0)) {
        throw NumericalFailure("a_roots: no upper bracket for the larger root");
    }
    roots.lambda2 = numerics::bisect(A, lstar, upper, 1e-15);
    return roots;
}

double choose_lambda0(const ModelParams& params, const Kernel& k1, double s, double lambda1) {
    if (!(lambda1 > 0.0)) {
        throw std::invalid_argument("choose_lambda0: lambda1 must be positive");
    }
    const double cap = std::min(lambda1, k1.lambda_hat());
    for (int k = 1; k < 1100; ++k) {
        const double lambda0 = std::ldexp(cap, -k);
        if (lambda0 < lambda1 && char_B(params, k1, lambda0, s) < 0.0) {
            return lambda0;
        }
    }
    throw NumericalFailure("choose_lambda0: no admissible lambda0 found");
}

}  // namespace nlwave
