#pragma once

// Travelling-wave profiles (phi, psi)(z), z = x - s t, connecting the
// co-existence state (a*, a*) at -inf to the predator-free state (1, 0) at +inf.
//
// The profile is the fixed point of
//
//   (beta - s D) u = H[phi, psi]
//   H1 = N1[phi] + beta phi + a phi (1 - phi) - psi
//   H2 = d N2[psi] + beta psi + b psi (1 - psi / phi)
//
// discretised with the five-point centred derivative D and the same
// convolution weights that the residual uses, so the discrete fixed point has
// zero discrete residual. Each sweep is damped and clipped into the bounds box.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlwave/bounds.hpp"
#include "nlwave/errors.hpp"
#include "nlwave/grid.hpp"

namespace nlwave {

struct ResidualPair {
    double phi = 0.0;  ///< sup norm of the prey equation
    double psi = 0.0;  ///< sup norm of the predator equation

    double max() const { return phi > psi ? phi : psi; }
};

struct WaveProfile {
    double s = 0.0;
    ModelParams params;
    Regime regime = Regime::Supercritical;
    double lambda1 = 0.0;
    double shift = 0.0;  ///< translation applied to the bundle and grid
    UniformGrid grid;
    std::vector<double> phi;
    std::vector<double> psi;
    double beta = 0.0;
    ResidualPair residual;
    std::size_t iterations = 0;
    double last_change = 0.0;
    bool converged = false;
    bool sandwiched = true;
};

struct SolveOptions {
    double L = 80.0;
    std::size_t n = 8000;  ///< grid intervals; spacing 2L/n
    double tol = 1e-6;
    std::size_t max_iter = 20000;
    double damping = 0.5;
    double shift = 0.0;
    /// Called after every sweep with (sweep, residual of the previous iterate, change).
    std::function<void(std::size_t, double, double)> monitor;
};

/// Thrown when the iteration stalls; carries the best iterate found.
class WaveNonConvergence : public NumericalFailure {
public:
    WaveNonConvergence(const std::string& what, WaveProfile best)
        : NumericalFailure(what), best_(std::move(best)) {}
    const WaveProfile& best() const { return best_; }

private:
    WaveProfile best_;
};

WaveProfile solve(const ModelParams& params, const Kernel& k1, const Kernel& k2,
                  const BoundsBundle& bundle, const SolveOptions& options = {});

/// Sup norms of both travelling-wave equations. Derivatives use the five-point
/// centred difference, convolutions extend the profile by its own end values
/// (the boundary limits themselves are checked by tail_check), and `edge`
/// points at each end are skipped.
ResidualPair residual(const WaveProfile& profile, const Kernel& k1, const Kernel& k2,
                      std::size_t edge = 5);

/// True when every sample lies between the bundle's lower and upper functions
/// (evaluated at z - shift), up to `slack`.
bool in_sandwich(const WaveProfile& profile, const BoundsBundle& bundle, double slack = 0.0);

struct TailReport {
    double phi_minus = 0.0;  ///< inf of phi over the leftmost 10% of the grid
    double phi_plus = 0.0;   ///< sup of phi there
    double psi_minus = 0.0;
    double psi_plus = 0.0;
    double right_phi_min = 0.0;  ///< rightmost 10% of the grid
    double right_phi_max = 0.0;
    double right_psi_max = 0.0;
    double left_gap = 0.0;   ///< sup |phi - a*| + sup |psi - a*| on the left window
    double right_gap = 0.0;  ///< sup |phi - 1| + sup |psi| on the right window
    double tol = 0.0;
    bool ordered = false;         ///< 1/2 < phi- <= psi- <= psi+ <= phi+ < 1 up to tol
    bool prey_lower_ok = false;   ///< a phi-(1 - phi-) <= psi+ + tol
    bool prey_upper_ok = false;   ///< a phi+(1 - phi+) >= psi- - tol
    std::vector<std::string> failures;

    bool ok() const { return failures.empty(); }
};

/// Tail statistics of a profile. The comparisons allow a slack of `tol`.
TailReport tail_check(const WaveProfile& profile, double tol = 1e-8);

}  // namespace nlwave
