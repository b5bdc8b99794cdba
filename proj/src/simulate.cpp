#include "nlwave/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nlwave {

SimState invasion_state(double X, std::size_t intervals) {
    if (!(X > 1.0) || intervals < 2) {
        throw std::invalid_argument("invasion_state: need X > 1 and at least two cells");
    }
    SimState st;
    st.grid = UniformGrid::spanning(0.0, X, intervals);
    st.U.assign(st.grid.n, 1.0);
    st.V.assign(st.grid.n, 0.0);
    for (std::size_t i = 0; i < st.grid.n; ++i) {
        if (st.grid.x(i) <= 1.0 + 1e-12) {
            st.V[i] = 0.5;
        }
    }
    return st;
}

SimState wave_state(const WaveProfile& profile) {
    SimState st;
    st.grid = profile.grid;
    st.U = profile.phi;
    st.V = profile.psi;
    return st;
}

double dt_max(const ModelParams& params, const SimState& state) {
    const double min_u = *std::min_element(state.U.begin(), state.U.end());
    const double u_ref = std::max(state.u_floor, 0.5 * min_u);
    return 0.25 / (std::max(1.0, params.d) + params.a + params.b * (1.0 + 1.0 / u_ref));
}

Simulator::Simulator(const ModelParams& params, const Kernel& k1, const Kernel& k2, double h)
    : params_(params), c1_(k1, h), c2_(k2, h) {
    params_.validate();
}

void Simulator::rhs_raw(const std::vector<double>& U, const std::vector<double>& V,
                        double u_floor, std::vector<double>& dU, std::vector<double>& dV) {
    const std::size_t n = U.size();
    const double a = params_.a;
    const double b = params_.b;
    const double d = params_.d;
    conv_.resize(n);
    dU.resize(n);
    dV.resize(n);
    c1_.apply_constant(U, U.front(), U.back(), conv_);
    for (std::size_t i = 0; i < n; ++i) {
        dU[i] = (conv_[i] - U[i]) + a * U[i] * (1.0 - U[i]) - V[i];
    }
    c2_.apply_constant(V, V.front(), V.back(), conv_);
    for (std::size_t i = 0; i < n; ++i) {
        double u = U[i];
        if (u < u_floor) {
            u = u_floor;
            ++guard_activations_;
        }
        dV[i] = d * (conv_[i] - V[i]) + b * V[i] * (1.0 - V[i] / u);
    }
}

std::size_t Simulator::rhs(const SimState& state, std::vector<double>& dU,
                           std::vector<double>& dV) {
    const std::size_t before = guard_activations_;
    rhs_raw(state.U, state.V, state.u_floor, dU, dV);
    return guard_activations_ - before;
}

void Simulator::step(SimState& state, double dt) {
    const std::size_t n = state.U.size();
    auto& k1u = k_[0];
    auto& k1v = k_[1];
    auto& k2u = k_[2];
    auto& k2v = k_[3];
    auto& k3u = k_[4];
    auto& k3v = k_[5];
    auto& k4u = k_[6];
    auto& k4v = k_[7];
    su_.resize(n);
    sv_.resize(n);

    rhs_raw(state.U, state.V, state.u_floor, k1u, k1v);
    for (std::size_t i = 0; i < n; ++i) {
        su_[i] = state.U[i] + 0.5 * dt * k1u[i];
        sv_[i] = state.V[i] + 0.5 * dt * k1v[i];
    }
    rhs_raw(su_, sv_, state.u_floor, k2u, k2v);
    for (std::size_t i = 0; i < n; ++i) {
        su_[i] = state.U[i] + 0.5 * dt * k2u[i];
        sv_[i] = state.V[i] + 0.5 * dt * k2v[i];
    }
    rhs_raw(su_, sv_, state.u_floor, k3u, k3v);
    for (std::size_t i = 0; i < n; ++i) {
        su_[i] = state.U[i] + dt * k3u[i];
        sv_[i] = state.V[i] + dt * k3v[i];
    }
    rhs_raw(su_, sv_, state.u_floor, k4u, k4v);

    const double w = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
        state.U[i] += w * (k1u[i] + 2.0 * (k2u[i] + k3u[i]) + k4u[i]);
        state.V[i] += w * (k1v[i] + 2.0 * (k2v[i] + k3v[i]) + k4v[i]);
    }
    state.t += dt;

    for (std::size_t i = 0; i < n; ++i) {
        if (state.U[i] < -state.u_floor || state.V[i] < -1e-12 || !std::isfinite(state.U[i]) ||
            !std::isfinite(state.V[i])) {
            std::ostringstream os;
            os << "simulation aborted at t = " << state.t << ", x = " << state.grid.x(i)
               << ": U = " << state.U[i] << ", V = " << state.V[i];
            throw SimulationAbort(os.str(), state);
        }
    }
}

std::pair<std::vector<double>, std::vector<double>> rhs(const SimState& state,
                                                        const ModelParams& params,
                                                        const Kernel& k1, const Kernel& k2) {
    Simulator sim(params, k1, k2, state.grid.h);
    std::pair<std::vector<double>, std::vector<double>> out;
    sim.rhs(state, out.first, out.second);
    return out;
}

SimState step(const SimState& state, double dt, const ModelParams& params, const Kernel& k1,
              const Kernel& k2) {
    Simulator sim(params, k1, k2, state.grid.h);
    SimState next = state;
    sim.step(next, dt);
    return next;
}

FrontPosition front_position(const SimState& state, double level) {
    const std::size_t n = state.V.size();
    for (std::size_t k = n; k-- > 0;) {
        if (state.V[k] >= level) {
            FrontPosition fp;
            fp.found = true;
            fp.x = state.grid.x(k);
            if (k + 1 < n) {
                const double v0 = state.V[k];
                const double v1 = state.V[k + 1];
                fp.x += state.grid.h * (v0 - level) / (v0 - v1);
            }
            return fp;
        }
    }
    return {};
}

double spreading_speed(FrontTrace& trace, double skip_fraction) {
    if (trace.samples.empty()) {
        throw PreconditionError("spreading_speed: empty front trace");
    }
    const double t_end = trace.samples.back().first;
    const double t_start = skip_fraction * t_end;
    double st = 0.0, sx = 0.0, stt = 0.0, stx = 0.0;
    std::size_t m = 0;
    for (const auto& [t, x] : trace.samples) {
        if (t >= t_start) {
            st += t;
            sx += x;
            stt += t * t;
            stx += t * x;
            ++m;
        }
    }
    if (m < 20) {
        std::ostringstream os;
        os << "spreading_speed: only " << m << " samples in the fit window (need 20)";
        throw PreconditionError(os.str());
    }
    const double dm = static_cast<double>(m);
    const double tbar = st / dm;
    const double xbar = sx / dm;
    const double slope = (stx - dm * tbar * xbar) / (stt - dm * tbar * tbar);
    const double icpt = xbar - slope * tbar;
    double ss = 0.0;
    for (const auto& [t, x] : trace.samples) {
        if (t >= t_start) {
            const double r = x - (icpt + slope * t);
            ss += r * r;
        }
    }
    trace.speed = slope;
    trace.t_lo = t_start;
    trace.t_hi = t_end;
    trace.fit_residual = std::sqrt(ss / dm);
    trace.fit_samples = m;
    return slope;
}

Trajectory run(const ModelParams& params, const Kernel& k1, const Kernel& k2,
               const SimState& initial, const RunOptions& options) {
    if (!(options.T >= 0.0) || !std::isfinite(options.T)) {
        throw std::invalid_argument("run: T must be finite and nonnegative");
    }
    if (initial.U.size() != initial.grid.n || initial.V.size() != initial.grid.n) {
        throw std::invalid_argument("run: state size does not match its grid");
    }
    Trajectory tr;
    tr.dt_max = dt_max(params, initial);
    double dt = options.dt > 0.0 ? options.dt : tr.dt_max;
    if (dt > tr.dt_max * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "run: dt = " << dt << " exceeds the stability bound " << tr.dt_max;
        throw PreconditionError(os.str());
    }
    const std::size_t steps =
        options.T > 0.0 ? static_cast<std::size_t>(std::ceil(options.T / dt - 1e-9)) : 0;
    dt = steps > 0 ? options.T / static_cast<double>(steps) : dt;
    tr.dt = dt;
    tr.steps = steps;

    SimState state = initial;
    Simulator sim(params, k1, k2, state.grid.h);
    for (double level : options.front_levels) {
        FrontTrace ft;
        ft.level = level;
        tr.fronts.push_back(ft);
    }
    auto observe = [&] {
        for (auto& ft : tr.fronts) {
            const FrontPosition fp = front_position(state, ft.level);
            if (fp.found) {
                ft.samples.emplace_back(state.t, fp.x);
            }
        }
        tr.min_U = std::min(tr.min_U, *std::min_element(state.U.begin(), state.U.end()));
        tr.max_V = std::max(tr.max_V, *std::max_element(state.V.begin(), state.V.end()));
    };
    tr.min_U = std::numeric_limits<double>::infinity();
    tr.max_V = 0.0;
    observe();
    tr.snapshots.push_back(state);

    for (std::size_t k = 1; k <= steps; ++k) {
        sim.step(state, dt);
        if (k == steps) {
            state.t = options.T;
        }
        observe();
        if ((options.snapshot_every > 0 && k % options.snapshot_every == 0) || k == steps) {
            if (tr.snapshots.back().t != state.t) {
                tr.snapshots.push_back(state);
            }
        }
    }
    tr.guard_activations = sim.guard_activations();
    for (auto& ft : tr.fronts) {
        const double tail = ft.samples.empty() ? 0.0 : ft.samples.back().first;
        std::size_t in_window = 0;
        for (const auto& sample : ft.samples) {
            in_window += sample.first >= options.skip_fraction * tail ? 1 : 0;
        }
        if (in_window >= 20) {
            spreading_speed(ft, options.skip_fraction);
        }
    }
    return tr;
}

namespace {

// Cubic Lagrange interpolation of samples on a uniform grid; constant beyond
// the ends.
double interpolate(const UniformGrid& grid, const std::vector<double>& f, double x) {
    const double u = (x - grid.x0) / grid.h;
    const long n = static_cast<long>(grid.n);
    if (u <= 0.0) {
        return f.front();
    }
    if (u >= static_cast<double>(n - 1)) {
        return f.back();
    }
    const double nearest = std::round(u);
    if (std::abs(u - nearest) < 1e-9) {
        return f[static_cast<std::size_t>(nearest)];
    }
    long i = static_cast<long>(std::floor(u)) - 1;
    i = std::clamp(i, 0L, n - 4);
    const double t = u - static_cast<double>(i);
    const double f0 = f[static_cast<std::size_t>(i)];
    const double f1 = f[static_cast<std::size_t>(i + 1)];
    const double f2 = f[static_cast<std::size_t>(i + 2)];
    const double f3 = f[static_cast<std::size_t>(i + 3)];
    const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    return l0 * f0 + l1 * f1 + l2 * f2 + l3 * f3;
}

}  // namespace

DriftReport wave_drift_test(const WaveProfile& profile, const ModelParams& params,
                            const Kernel& k1, const Kernel& k2, double T, double dt,
                            double speed_factor, double margin) {
    const SimState initial = wave_state(profile);
    RunOptions opt;
    opt.T = T;
    opt.dt = dt;
    const Trajectory tr = run(params, k1, k2, initial, opt);
    const SimState& last = tr.snapshots.back();

    DriftReport rep;
    rep.T = T;
    rep.dt = tr.dt;
    rep.shift = speed_factor * profile.s * T;
    const UniformGrid& g = profile.grid;
    rep.x_lo = g.x0 + margin + std::max(rep.shift, 0.0);
    rep.x_hi = g.back() - margin + std::min(rep.shift, 0.0);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        if (x < rep.x_lo || x > rep.x_hi) {
            continue;
        }
        const double phi = interpolate(g, profile.phi, x - rep.shift);
        const double psi = interpolate(g, profile.psi, x - rep.shift);
        rep.discrepancy = std::max(
            {rep.discrepancy, std::abs(last.U[i] - phi), std::abs(last.V[i] - psi)});
    }
    return rep;
}

}  // namespace nlwave
