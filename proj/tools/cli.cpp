#include "nlwave/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "nlwave/bounds.hpp"
#include "nlwave/config.hpp"
#include "nlwave/dispersion.hpp"
#include "nlwave/errors.hpp"
#include "nlwave/io.hpp"
#include "nlwave/simulate.hpp"
#include "nlwave/wave.hpp"

namespace nlwave::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

/// Raised when a command ran to completion but its result fails a check
/// (verification, convergence); the outputs are already on disk.
struct CommandFailed {
    int code;
    std::string message;
};

struct Context {
    Context(RunConfig c, Kernel j1, Kernel j2)
        : config(std::move(c)), k1(std::move(j1)), k2(std::move(j2)) {}

    RunConfig config;
    Kernel k1;
    Kernel k2;
    fs::path out_dir;
    bool quiet = false;
    std::ostream* out = nullptr;

    void say(const std::string& line) const {
        if (!quiet) {
            *out << line << '\n';
        }
    }
};

template <class Block>
const Block& need(const std::optional<Block>& block, const char* name) {
    if (!block) {
        throw ConfigError(std::string("config has no '") + name + "' block for this command");
    }
    return *block;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

SpeedReport speed_for(const Context& ctx) { return minimal_speed(ctx.config.params, ctx.k2); }

/// Builds the bundle for a speed choice: the critical construction when the
/// resolved speed equals s*, the supercritical one otherwise.
BoundsBundle bundle_for(const Context& ctx, const SpeedChoice& choice) {
    const SpeedReport sp = speed_for(ctx);
    if (!sp.attained) {
        throw PreconditionError("the minimal speed is not attained for this kernel; no bundle");
    }
    const double s = choice.resolve(sp.s_star);
    if (choice.critical || is_critical(s, sp.s_star)) {
        return construct_critical(ctx.config.params, ctx.k1, ctx.k2);
    }
    return construct_supercritical(ctx.config.params, ctx.k1, ctx.k2, s);
}

int cmd_speed(const Context& ctx) {
    need(ctx.config.speed, "speed");
    const SpeedReport sp = speed_for(ctx);
    io::write_json(ctx.out_dir / "speed.json", io::to_json(sp));
    if (!sp.attained) {
        throw CommandFailed{precondition_failed,
                            "the infimum defining s* is not attained below lambda_hat; "
                            "speed.json records the bracket"};
    }
    ctx.say("s* = " + fmt(sp.s_star) + "  lambda* = " + fmt(sp.lambda_star));
    return ok;
}

int cmd_roots(const Context& ctx) {
    const auto& block = need(ctx.config.roots, "roots");
    const SpeedReport sp = speed_for(ctx);
    const double s = block.speed.resolve(sp.s_star);
    const RootPair roots = a_roots(ctx.config.params, ctx.k2, s, sp);
    json doc = io::to_json(roots);
    doc["s_star"] = sp.s_star;
    io::write_json(ctx.out_dir / "roots.json", doc);
    ctx.say("s = " + fmt(s) + "  lambda1 = " + fmt(roots.lambda1) + "  lambda2 = " +
            fmt(roots.lambda2));
    return ok;
}

int cmd_bounds(const Context& ctx) {
    const auto& block = need(ctx.config.bounds, "bounds");
    ctx.config.params.require_wave_hypotheses();
    const BoundsBundle bundle = bundle_for(ctx, block.speed);
    io::write_json(ctx.out_dir / "bundle.json", io::to_json(bundle));

    VerifyOptions vo;
    vo.grid_span = block.grid_span;
    vo.grid_n = block.grid_n;
    vo.kink_radius = block.kink_radius;
    const VerificationReport rep = verify(bundle, ctx.k1, ctx.k2, vo);
    io::write_json(ctx.out_dir / "verification.json", io::to_json(rep));

    ctx.say(to_string(bundle.regime) + " bundle at s = " + fmt(bundle.s) +
            ": max U1 = " + fmt(rep.max_u1.value) + ", max U2 = " + fmt(rep.max_u2.value) +
            ", min L1 = " + fmt(rep.min_l1.value) + ", min L2 = " + fmt(rep.min_l2.value));
    if (!rep.pass) {
        throw CommandFailed{numerical_failure,
                            "bundle verification failed; see verification.json"};
    }
    return ok;
}

void write_profile(const Context& ctx, const WaveProfile& p, const BoundsBundle& bundle) {
    io::write_profile_csv(ctx.out_dir / "profile.csv", p);
    json sidecar = io::profile_sidecar(p);
    sidecar["bundle"] = io::to_json(bundle);
    io::write_json(ctx.out_dir / "profile.json", sidecar);
    io::write_json(ctx.out_dir / "tail.json", io::to_json(tail_check(p)));
}

int cmd_wave(const Context& ctx) {
    const auto& block = need(ctx.config.wave, "wave");
    ctx.config.params.require_wave_hypotheses();
    BoundsBundle bundle;
    if (block.bundle) {
        try {
            bundle = io::bundle_from_json(io::read_json(*block.bundle));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("wave.bundle: " + block.bundle->string() + " is not a bundle (" +
                              e.what() + ")");
        } catch (const std::runtime_error& e) {
            throw ConfigError(std::string("wave.bundle: ") + e.what());
        }
    } else {
        bundle = bundle_for(ctx, block.speed);
    }

    SolveOptions so;
    so.L = block.L;
    so.n = block.n;
    so.tol = block.tol;
    so.max_iter = block.max_iter;
    so.damping = block.damping;
    if (!ctx.quiet) {
        so.monitor = [&ctx](std::size_t k, double res, double change) {
            if (k % 500 == 0) {
                ctx.say("  sweep " + std::to_string(k) + "  residual " + fmt(res) +
                        "  change " + fmt(change));
            }
        };
    }

    WaveProfile profile;
    try {
        profile = solve(ctx.config.params, ctx.k1, ctx.k2, bundle, so);
    } catch (const WaveNonConvergence& e) {
        write_profile(ctx, e.best(), bundle);
        throw CommandFailed{numerical_failure,
                            std::string(e.what()) + "; best iterate written to profile.csv"};
    }
    write_profile(ctx, profile, bundle);
    const TailReport tail = tail_check(profile);
    ctx.say("converged in " + std::to_string(profile.iterations) + " sweeps, residual " +
            fmt(profile.residual.max()) + ", left gap " + fmt(tail.left_gap) +
            ", right gap " + fmt(tail.right_gap));
    if (!tail.ok()) {
        throw CommandFailed{numerical_failure, "tail check failed; see tail.json"};
    }
    return ok;
}

WaveProfile load_profile(const fs::path& path) {
    try {
        return io::read_profile(path);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("simulate.profile: malformed sidecar for " + path.string() + " (" +
                          e.what() + ")");
    } catch (const std::runtime_error& e) {
        throw ConfigError(std::string("simulate.profile: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("simulate.profile: malformed number in " + path.string());
    }
}

int cmd_simulate(const Context& ctx) {
    const auto& block = need(ctx.config.simulate, "simulate");
    const ModelParams& params = ctx.config.params;

    std::optional<WaveProfile> profile;
    SimState initial;
    if (block.initial == "wave") {
        profile = load_profile(*block.profile);
        if (!(profile->params == params)) {
            throw PreconditionError("simulate: the profile was computed for other model parameters");
        }
        initial = wave_state(*profile);
    } else {
        const double cells = std::round(block.X / block.h);
        if (std::abs(cells * block.h - block.X) > 1e-9 * block.X) {
            throw ConfigError("simulate.h must divide simulate.X");
        }
        initial = invasion_state(block.X, static_cast<std::size_t>(cells));
    }

    RunOptions ro;
    ro.T = block.T;
    ro.dt = block.dt;
    ro.snapshot_every = block.snapshot_every;
    ro.front_levels = block.levels.empty() ? std::vector<double>{params.a_star() / 2.0}
                                           : block.levels;
    ro.skip_fraction = block.skip_fraction;

    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory tr = run(params, ctx.k1, ctx.k2, initial, ro);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json manifest;
    manifest["initial"] = block.initial;
    manifest["params"] = io::to_json(params);
    const json resolved = resolved_json(ctx.config);
    manifest["kernels"] = {{"J1", resolved["J1"]}, {"J2", resolved["J2"]}};
    manifest["T"] = block.T;
    io::write_trajectory(ctx.out_dir / "trajectory", tr, manifest);

    const SpeedReport sp = speed_for(ctx);
    json summary;
    summary["s_star"] = sp.attained ? json(sp.s_star) : json(nullptr);
    summary["dt"] = tr.dt;
    summary["steps"] = tr.steps;
    summary["guard_activations"] = tr.guard_activations;
    summary["min_U"] = tr.min_U;
    json fronts = json::array();
    for (std::size_t k = 0; k < tr.fronts.size(); ++k) {
        const FrontTrace& f = tr.fronts[k];
        char name[32];
        std::snprintf(name, sizeof name, "front_%02zu.csv", k);
        io::write_front_csv(ctx.out_dir / name, f);
        json entry = io::to_json(f);
        entry["file"] = name;
        if (sp.attained) {
            entry["speed_over_s_star"] = f.speed / sp.s_star;
        }
        fronts.push_back(entry);
        ctx.say("level " + fmt(f.level) + ": front speed " + fmt(f.speed) +
                (sp.attained ? " (" + fmt(f.speed / sp.s_star) + " s*)" : std::string()));
    }
    summary["fronts"] = fronts;
    io::write_json(ctx.out_dir / "speed_summary.json", summary);
    ctx.say(std::to_string(tr.steps) + " steps of dt = " + fmt(tr.dt) + " in " + fmt(secs) + " s");

    if (profile) {
        const DriftReport dr = wave_drift_test(*profile, params, ctx.k1, ctx.k2, block.T, block.dt);
        io::write_json(ctx.out_dir / "drift.json", io::to_json(dr));
        ctx.say("drift against translation by s T: " + fmt(dr.discrepancy));
    }
    return ok;
}

int cmd_validate_kernel(const Context& ctx) {
    const auto& block = need(ctx.config.validate_kernel, "validate-kernel");
    json doc;
    bool all_ok = true;
    for (const std::string& name : block.kernels) {
        const Kernel& k = name == "J1" ? ctx.k1 : ctx.k2;
        const ValidationReport rep = validate(k);
        json entry = io::to_json(rep);
        entry["family"] = to_string(k.family());
        doc[name] = entry;
        all_ok = all_ok && rep.ok();
        ctx.say(name + " (" + to_string(k.family()) + "): " + (rep.ok() ? "ok" : "FAILED"));
        for (const auto& f : rep.failures) {
            ctx.say("  " + f);
        }
    }
    io::write_json(ctx.out_dir / "kernel_report.json", doc);
    if (!all_ok) {
        throw CommandFailed{precondition_failed, "kernel hypotheses violated; see kernel_report.json"};
    }
    return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Travelling waves of a prey-predator system with nonlocal dispersal", "nlwave"};
    std::string config_path;
    std::string out_dir;
    bool quiet = false;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory (overrides the config's output)");
    app.add_flag("--quiet", quiet, "suppress progress messages");
    app.require_subcommand(1, 1);
    app.fallthrough();

    using Command = int (*)(const Context&);
    const std::vector<std::pair<std::string, Command>> commands{
        {"speed", cmd_speed},       {"roots", cmd_roots},       {"bounds", cmd_bounds},
        {"wave", cmd_wave},         {"simulate", cmd_simulate}, {"validate-kernel", cmd_validate_kernel},
    };
    const std::vector<std::string> help{
        "minimal wave speed s* and lambda*",
        "roots lambda1 < lambda2 of the predator characteristic function",
        "construct and verify the upper/lower solutions",
        "solve for a travelling-wave profile",
        "time-step the full system and measure front speeds",
        "check the kernel hypotheses",
    };
    for (std::size_t i = 0; i < commands.size(); ++i) {
        app.add_subcommand(commands[i].first, help[i]);
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : config_error;
    }

    Command command = nullptr;
    std::string name;
    for (const auto& [n, c] : commands) {
        if (app.got_subcommand(n)) {
            command = c;
            name = n;
        }
    }

    try {
        RunConfig config = load_config(config_path);
        const fs::path dir = !out_dir.empty() ? fs::path(out_dir)
                                              : config.output.value_or(fs::path("."));
        fs::create_directories(dir);
        io::write_json(dir / "config.resolved.json", resolved_json(config));
        auto build = [](const KernelSpec& spec, const char* which) {
            try {
                return spec.build();
            } catch (const std::exception& e) {
                throw ConfigError(std::string(which) + ": " + e.what());
            }
        };
        Kernel j1 = build(config.J1, "J1");
        Kernel j2 = build(config.J2, "J2");
        Context ctx(std::move(config), std::move(j1), std::move(j2));
        ctx.out_dir = dir;
        ctx.quiet = quiet;
        ctx.out = &out;
        return command(ctx);
    } catch (const CommandFailed& e) {
        err << name << ": " << e.message << '\n';
        return e.code;
    } catch (const ConfigError& e) {
        err << name << ": " << e.what() << '\n';
        return config_error;
    } catch (const DomainError& e) {
        err << name << ": " << e.what() << '\n';
        return precondition_failed;
    } catch (const std::invalid_argument& e) {
        err << name << ": " << e.what() << '\n';
        return precondition_failed;
    } catch (const NumericalFailure& e) {
        err << name << ": " << e.what() << '\n';
        return numerical_failure;
    } catch (const std::exception& e) {
        err << name << ": " << e.what() << '\n';
        return numerical_failure;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace nlwave::cli
