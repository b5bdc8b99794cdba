#pragma once

// Method-of-lines simulation of
//
//   U_t = N1[U] + a U (1 - U) - V
//   V_t = d N2[V] + b V (1 - V / U)
//
// with classical RK4 in time. The nonlocal operators are bounded, so the
// explicit step is limited by the reaction terms only.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlwave/convolution.hpp"
#include "nlwave/dispersion.hpp"
#include "nlwave/errors.hpp"
#include "nlwave/grid.hpp"
#include "nlwave/kernels.hpp"
#include "nlwave/wave.hpp"

namespace nlwave {

struct SimState {
    UniformGrid grid;
    std::vector<double> U;
    std::vector<double> V;
    double t = 0.0;
    double u_floor = 1e-8;
};

/// Run aborted because an invariant failed; carries the offending state.
class SimulationAbort : public NumericalFailure {
public:
    SimulationAbort(const std::string& what, SimState snapshot)
        : NumericalFailure(what), snapshot_(std::move(snapshot)) {}
    const SimState& snapshot() const { return snapshot_; }

private:
    SimState snapshot_;
};

/// U = 1, V = 0.5 on [0, 1] and 0 elsewhere, on [0, X] with `intervals` cells.
SimState invasion_state(double X, std::size_t intervals);
/// The profile's own samples as initial data (x = z at t = 0).
SimState wave_state(const WaveProfile& profile);

/// Largest stable step: 0.25 / (max(1, d) + a + b (1 + 1/U_ref)) with
/// U_ref = max(u_floor, min(U) / 2).
double dt_max(const ModelParams& params, const SimState& state);

/// Evaluates the right-hand side with constant tails: U and V continue with
/// their own edge values, so V is 0 ahead of an invasion front.
class Simulator {
public:
    Simulator(const ModelParams& params, const Kernel& k1, const Kernel& k2, double h);

    /// Returns the number of points at which the U floor was applied.
    std::size_t rhs(const SimState& state, std::vector<double>& dU, std::vector<double>& dV);
    /// One RK4 step. Throws SimulationAbort when U < -u_floor or V < -1e-12.
    void step(SimState& state, double dt);

    std::size_t guard_activations() const { return guard_activations_; }

private:
    void rhs_raw(const std::vector<double>& U, const std::vector<double>& V, double u_floor,
                 std::vector<double>& dU, std::vector<double>& dV);

    ModelParams params_;
    Convolver c1_;
    Convolver c2_;
    std::size_t guard_activations_ = 0;
    std::vector<double> conv_;
    std::vector<double> k_[8];
    std::vector<double> su_, sv_;
};

/// Convenience wrappers around a one-off Simulator.
std::pair<std::vector<double>, std::vector<double>> rhs(const SimState& state,
                                                        const ModelParams& params,
                                                        const Kernel& k1, const Kernel& k2);
SimState step(const SimState& state, double dt, const ModelParams& params, const Kernel& k1,
              const Kernel& k2);

struct FrontPosition {
    double x = 0.0;
    bool found = false;
};

/// Largest x with V(x) >= level, linearly interpolated to the crossing.
FrontPosition front_position(const SimState& state, double level);

struct FrontTrace {
    double level = 0.0;
    std::vector<std::pair<double, double>> samples;  ///< (t, x_front)
    double speed = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double fit_residual = 0.0;  ///< root-mean-square deviation from the fitted line
    std::size_t fit_samples = 0;
};

/// Least-squares slope of x_front against t over samples with
/// t >= skip_fraction * t_final. Fills the fit fields of `trace` and returns
/// the slope. Throws PreconditionError with fewer than 20 samples in the window.
double spreading_speed(FrontTrace& trace, double skip_fraction = 0.3);

struct RunOptions {
    double T = 0.0;
    double dt = 0.0;                  ///< <= 0 selects dt_max
    std::size_t snapshot_every = 0;   ///< steps between stored snapshots; 0 keeps first and last
    std::vector<double> front_levels; ///< levels traced after every step
    double skip_fraction = 0.3;
};

struct Trajectory {
    std::vector<SimState> snapshots;
    std::vector<FrontTrace> fronts;
    double dt = 0.0;
    double dt_max = 0.0;
    std::size_t steps = 0;
    std::size_t guard_activations = 0;
    double min_U = 0.0;
    double max_V = 0.0;
};

/// Deterministic time integration from `initial` to time T.
Trajectory run(const ModelParams& params, const Kernel& k1, const Kernel& k2,
               const SimState& initial, const RunOptions& options);

struct DriftReport {
    double T = 0.0;
    double shift = 0.0;        ///< translation compared against
    double discrepancy = 0.0;  ///< sup over both components away from the edges
    double x_lo = 0.0;         ///< compared window
    double x_hi = 0.0;
    double dt = 0.0;
};

/// Evolves a profile for time T and compares it with the initial profile
/// translated by speed_factor * s * T (cubic interpolation), `margin` away
/// from the domain edges.
DriftReport wave_drift_test(const WaveProfile& profile, const ModelParams& params,
                            const Kernel& k1, const Kernel& k2, double T, double dt = 0.0,
                            double speed_factor = 1.0, double margin = 20.0);

}  // namespace nlwave
