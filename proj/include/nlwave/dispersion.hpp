#pragma once

// Linear spreading analysis at the predator-free state:
//
//   A(lambda; s) = d [I2(lambda) - 1] - s lambda + b      (predator)
//   B(lambda; s) =   [I1(lambda) - 1] - s lambda          (prey)
//   s* = inf_{0 < lambda < lambda_hat_2} (d [I2(lambda) - 1] + b) / lambda

#include <utility>
#include <vector>

#include "nlwave/kernels.hpp"

namespace nlwave {

struct ModelParams {
    double a = 0.0;  ///< prey growth rate
    double b = 0.0;  ///< predator growth rate
    double d = 0.0;  ///< predator dispersal coefficient

    double a_star() const { return 1.0 - 1.0 / a; }

    /// Throws std::invalid_argument unless a, b, d are finite and positive.
    void validate() const;
    /// Throws PreconditionError unless a >= 4 and d < b.
    void require_wave_hypotheses() const;

    bool operator==(const ModelParams&) const = default;
};

struct SpeedReport {
    double s_star = 0.0;
    double lambda_star = 0.0;
    std::vector<std::pair<double, double>> objective_samples;  ///< (lambda, F(lambda))
    bool attained = false;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

struct RootPair {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double s = 0.0;
};

double char_A(const ModelParams& params, const Kernel& k2, double lambda, double s);
double char_B(const ModelParams& params, const Kernel& k1, double lambda, double s);

/// F(lambda) = (d [I2(lambda) - 1] + b) / lambda.
double speed_objective(const ModelParams& params, const Kernel& k2, double lambda);

/// Golden-section minimisation of F on a bracket found by doubling from 1e-3,
/// followed by a bisection polish of F'(lambda) = 0.
SpeedReport minimal_speed(const ModelParams& params, const Kernel& k2);

/// True when |s - s*| <= 1e-12 s*.
bool is_critical(double s, double s_star);

/// The two positive roots of A(.; s) for s > s*. Throws PreconditionError for
/// s <= s* (pointing the caller to minimal_speed).
RootPair a_roots(const ModelParams& params, const Kernel& k2, double s);
RootPair a_roots(const ModelParams& params, const Kernel& k2, double s, const SpeedReport& speed);

/// Largest min{lambda1, lambda_hat_1} / 2^k (k >= 1) with B(lambda0; s) < 0.
double choose_lambda0(const ModelParams& params, const Kernel& k1, double s, double lambda1);

}  // namespace nlwave
