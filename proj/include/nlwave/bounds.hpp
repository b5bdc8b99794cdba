#pragma once

// Upper/lower solution quadruples (phi_bar, phi_low, psi_bar, psi_low) for the
// travelling-wave system
//
//   N1[phi] + s phi' + a phi (1 - phi) - psi        = 0
//   d N2[psi] + s psi' + b psi (1 - psi / phi)      = 0
//
// in the supercritical regime (s > s*) and in the critical regime (s = s*,
// compactly supported J2), together with a numerical check of the four
// differential inequalities away from the kink set.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "nlwave/dispersion.hpp"
#include "nlwave/kernels.hpp"

namespace nlwave {

enum class Regime { Supercritical, Critical };

std::string to_string(Regime regime);

struct BoundValues {
    double phi_bar = 0.0;
    double phi_low = 0.0;
    double psi_bar = 0.0;
    double psi_low = 0.0;
};

/// All constants of one construction. Constants that do not belong to the
/// regime are NaN (mu in the critical case; h, z2, z3, z4, S in the
/// supercritical case).
struct BoundsBundle {
    static constexpr double absent = std::numeric_limits<double>::quiet_NaN();

    Regime regime = Regime::Supercritical;
    double s = 0.0;
    ModelParams params;
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;  ///< equals lambda1 in the critical case (double root)
    double mu = absent;
    double q = 0.0;
    double delta = 0.0;
    double epsilon = 0.0;
    double h = absent;
    double z0 = 0.0;
    double z1 = 0.0;
    double z2 = absent;
    double z3 = absent;
    double z4 = absent;
    double zM = 0.0;
    double S = absent;

    /// Abscissae where one-sided derivatives of the four functions differ.
    std::vector<double> kinks() const;

    BoundValues eval(double z) const;
    /// Derivatives, taken from the right at kink points.
    BoundValues derivative(double z) const;
    /// Limits as z -> +inf: (1, 1, 0, 0).
    static BoundValues right_limits() { return {1.0, 1.0, 0.0, 0.0}; }
};

/// f(z) = e^{-lambda1 z} - q e^{-mu lambda1 z} (supercritical lower predator branch).
double supercritical_f(const BoundsBundle& bundle, double z);
/// g(z) = (h z - q sqrt z) e^{-lambda1 z} (critical lower predator branch).
double critical_g(const BoundsBundle& bundle, double z);

BoundsBundle construct_supercritical(const ModelParams& params, const Kernel& k1, const Kernel& k2,
                                     double s);
BoundsBundle construct_critical(const ModelParams& params, const Kernel& k1, const Kernel& k2);

BoundValues eval_bundle(const BoundsBundle& bundle, double z);

struct Extremum {
    double value = 0.0;
    double z = std::numeric_limits<double>::quiet_NaN();
};

/// Grid points on which one inequality fails by more than the tolerance.
struct ViolationSpan {
    std::size_t count = 0;
    double lo = std::numeric_limits<double>::quiet_NaN();
    double hi = std::numeric_limits<double>::quiet_NaN();

    void add(double z) {
        if (count++ == 0) {
            lo = z;
        }
        hi = z;
    }
};

struct VerificationReport {
    Extremum max_u1;  ///< upper prey inequality, must be <= tol
    Extremum max_u2;  ///< upper predator inequality, must be <= tol
    Extremum min_l1;  ///< lower prey inequality, must be >= -tol
    Extremum min_l2;  ///< lower predator inequality, must be >= -tol
    ViolationSpan u1_violations;
    ViolationSpan u2_violations;
    ViolationSpan l1_violations;
    ViolationSpan l2_violations;
    double tol = 1e-9;
    std::size_t points_checked = 0;
    bool ordered = true;  ///< phi_low <= phi_bar and psi_low <= psi_bar on the grid
    bool pass = false;
};

struct VerifyOptions {
    double grid_span = 50.0;
    std::size_t grid_n = 20000;
    double kink_radius = 1e-3;
    double tol = 1e-9;
    double quad_tol = 1e-13;
};

/// The four residuals at a single abscissa (U1, U2, L1, L2).
struct InequalityValues {
    double u1 = 0.0;
    double u2 = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
};
InequalityValues inequalities_at(const BoundsBundle& bundle, const Kernel& k1, const Kernel& k2,
                                 double z, double quad_tol = 1e-13);

VerificationReport verify(const BoundsBundle& bundle, const Kernel& k1, const Kernel& k2,
                          const VerifyOptions& options = {});

}  // namespace nlwave
