#include "nlwave/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nlwave {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& message) {
    throw ConfigError("config field '" + field + "': " + message);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
        fail(where, "must be an object");
    }
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            fail(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
        }
    }
}

std::string path_of(const std::string& where, const std::string& key) {
    return where.empty() ? key : where + "." + key;
}

double number(const json& obj, const std::string& where, const std::string& key) {
    const std::string field = path_of(where, key);
    if (!obj.contains(key)) {
        fail(field, "is required");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
        fail(field, "must be a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        fail(field, "must be finite");
    }
    return x;
}

double positive(const json& obj, const std::string& where, const std::string& key) {
    const double x = number(obj, where, key);
    if (!(x > 0.0)) {
        std::ostringstream os;
        os << "must be positive (got " << x << ")";
        fail(path_of(where, key), os.str());
    }
    return x;
}

double positive_or(const json& obj, const std::string& where, const std::string& key,
                   double fallback) {
    return obj.contains(key) ? positive(obj, where, key) : fallback;
}

std::size_t count_or(const json& obj, const std::string& where, const std::string& key,
                     std::size_t fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        fail(path_of(where, key), "must be a nonnegative integer");
    }
    return v.get<std::size_t>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

std::string string_field(const json& obj, const std::string& where, const std::string& key) {
    const json& v = obj.at(key);
    if (!v.is_string()) {
        fail(path_of(where, key), "must be a string");
    }
    return v.get<std::string>();
}

KernelSpec parse_kernel(const json& obj, const std::string& where,
                        const std::filesystem::path& base) {
    if (!obj.is_object() || !obj.contains("family")) {
        fail(path_of(where, "family"), "is required");
    }
    KernelSpec k;
    k.family = string_field(obj, where, "family");
    if (k.family == "uniform" || k.family == "triangular") {
        check_keys(obj, where, {"family", "S"});
        k.S = positive(obj, where, "S");
    } else if (k.family == "truncated_gaussian") {
        check_keys(obj, where, {"family", "S", "sigma"});
        k.S = positive(obj, where, "S");
        k.sigma = positive(obj, where, "sigma");
    } else if (k.family == "laplace") {
        check_keys(obj, where, {"family", "alpha"});
        k.alpha = positive(obj, where, "alpha");
    } else if (k.family == "gaussian") {
        check_keys(obj, where, {"family", "sigma"});
        k.sigma = positive(obj, where, "sigma");
    } else if (k.family == "tabulated") {
        check_keys(obj, where, {"family", "path"});
        if (!obj.contains("path")) {
            fail(path_of(where, "path"), "is required");
        }
        k.table = resolve(base, string_field(obj, where, "path"));
    } else {
        fail(path_of(where, "family"), "unknown kernel family '" + k.family + "'");
    }
    return k;
}

SpeedChoice parse_speed(const json& obj, const std::string& where, bool allow_critical) {
    SpeedChoice c;
    const bool has_s = obj.contains("s");
    const bool has_factor = obj.contains("s_factor");
    if (has_s && has_factor) {
        fail(where, "give either s or s_factor, not both");
    }
    if (!has_s && !has_factor) {
        fail(path_of(where, "s"), "is required (a number, s_factor, or \"critical\")");
    }
    if (has_s && obj.at("s").is_string()) {
        if (!allow_critical || obj.at("s").get<std::string>() != "critical") {
            fail(path_of(where, "s"), allow_critical ? "must be a number or \"critical\""
                                                     : "must be a number");
        }
        c.critical = true;
    } else if (has_s) {
        c.s = positive(obj, where, "s");
    } else {
        c.s_factor = positive(obj, where, "s_factor");
    }
    return c;
}

json speed_json(const SpeedChoice& c) {
    if (c.critical) {
        return {{"s", "critical"}};
    }
    if (c.s) {
        return {{"s", *c.s}};
    }
    return {{"s_factor", *c.s_factor}};
}

nlohmann::ordered_json kernel_json(const KernelSpec& k) {
    nlohmann::ordered_json j{{"family", k.family}};
    if (k.family == "uniform" || k.family == "triangular") {
        j["S"] = k.S;
    } else if (k.family == "truncated_gaussian") {
        j["S"] = k.S;
        j["sigma"] = k.sigma;
    } else if (k.family == "laplace") {
        j["alpha"] = k.alpha;
    } else if (k.family == "gaussian") {
        j["sigma"] = k.sigma;
    } else {
        j["path"] = k.table.string();
    }
    return j;
}

}  // namespace

Kernel KernelSpec::build() const {
    if (family == "uniform") return Kernel::uniform(S);
    if (family == "triangular") return Kernel::triangular(S);
    if (family == "truncated_gaussian") return Kernel::truncated_gaussian(sigma, S);
    if (family == "laplace") return Kernel::laplace(alpha);
    if (family == "gaussian") return Kernel::gaussian(sigma);
    if (family == "tabulated") return Kernel::load_table(table);
    throw ConfigError("unknown kernel family '" + family + "'");
}

double SpeedChoice::resolve(double s_star) const {
    if (critical) return s_star;
    if (s) return *s;
    return *s_factor * s_star;
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base) {
    check_keys(doc, "", {"params", "J1", "J2", "speed", "roots", "bounds", "wave", "simulate",
                         "validate-kernel", "output"});
    RunConfig cfg;

    if (!doc.contains("params")) {
        fail("params", "is required");
    }
    const json& p = doc.at("params");
    check_keys(p, "params", {"a", "b", "d"});
    cfg.params.a = positive(p, "params", "a");
    cfg.params.b = positive(p, "params", "b");
    cfg.params.d = positive(p, "params", "d");

    if (!doc.contains("J1")) {
        fail("J1", "is required");
    }
    cfg.J1 = parse_kernel(doc.at("J1"), "J1", base);
    cfg.J2 = doc.contains("J2") ? parse_kernel(doc.at("J2"), "J2", base) : cfg.J1;

    if (doc.contains("speed")) {
        check_keys(doc.at("speed"), "speed", {});
        cfg.speed = SpeedBlock{};
    }
    if (doc.contains("roots")) {
        const json& r = doc.at("roots");
        check_keys(r, "roots", {"s", "s_factor"});
        cfg.roots = RootsBlock{parse_speed(r, "roots", false)};
    }
    if (doc.contains("bounds")) {
        const json& r = doc.at("bounds");
        check_keys(r, "bounds", {"s", "s_factor", "grid_span", "grid_n", "kink_radius"});
        BoundsBlock b;
        b.speed = parse_speed(r, "bounds", true);
        b.grid_span = positive_or(r, "bounds", "grid_span", b.grid_span);
        b.grid_n = count_or(r, "bounds", "grid_n", b.grid_n);
        b.kink_radius = positive_or(r, "bounds", "kink_radius", b.kink_radius);
        if (b.grid_n < 2) {
            fail("bounds.grid_n", "must be at least 2");
        }
        cfg.bounds = b;
    }
    if (doc.contains("wave")) {
        const json& r = doc.at("wave");
        check_keys(r, "wave", {"s", "s_factor", "L", "n", "tol", "max_iter", "damping", "bundle"});
        WaveBlock w;
        if (r.contains("bundle")) {
            if (r.contains("s") || r.contains("s_factor")) {
                fail("wave.bundle", "a stored bundle fixes the speed; drop s / s_factor");
            }
            w.bundle = resolve(base, string_field(r, "wave", "bundle"));
        } else {
            w.speed = parse_speed(r, "wave", true);
        }
        w.L = positive_or(r, "wave", "L", w.L);
        w.n = count_or(r, "wave", "n", w.n);
        w.tol = positive_or(r, "wave", "tol", w.tol);
        w.max_iter = count_or(r, "wave", "max_iter", w.max_iter);
        w.damping = positive_or(r, "wave", "damping", w.damping);
        if (w.damping > 1.0) {
            fail("wave.damping", "must lie in (0, 1]");
        }
        cfg.wave = w;
    }
    if (doc.contains("simulate")) {
        const json& r = doc.at("simulate");
        check_keys(r, "simulate", {"initial", "X", "h", "T", "dt", "level", "levels",
                                   "skip_fraction", "snapshot_every", "profile"});
        SimulateBlock sb;
        if (r.contains("initial")) {
            sb.initial = string_field(r, "simulate", "initial");
        }
        if (sb.initial != "invasion" && sb.initial != "wave") {
            fail("simulate.initial", "must be \"invasion\" or \"wave\"");
        }
        sb.X = positive_or(r, "simulate", "X", sb.X);
        sb.h = positive_or(r, "simulate", "h", sb.h);
        if (r.contains("T")) {
            sb.T = number(r, "simulate", "T");
            if (sb.T < 0.0) {
                fail("simulate.T", "must be nonnegative");
            }
        }
        sb.dt = positive_or(r, "simulate", "dt", 0.0);
        if (r.contains("level") && r.contains("levels")) {
            fail("simulate", "give either level or levels, not both");
        }
        if (r.contains("level")) {
            sb.levels = {positive(r, "simulate", "level")};
        }
        if (r.contains("levels")) {
            const json& ls = r.at("levels");
            if (!ls.is_array() || ls.empty()) {
                fail("simulate.levels", "must be a nonempty array of numbers");
            }
            for (std::size_t i = 0; i < ls.size(); ++i) {
                if (!ls[i].is_number() || !(ls[i].get<double>() > 0.0)) {
                    fail("simulate.levels[" + std::to_string(i) + "]", "must be positive");
                }
                sb.levels.push_back(ls[i].get<double>());
            }
        }
        if (r.contains("skip_fraction")) {
            sb.skip_fraction = number(r, "simulate", "skip_fraction");
            if (sb.skip_fraction < 0.0 || sb.skip_fraction >= 1.0) {
                fail("simulate.skip_fraction", "must lie in [0, 1)");
            }
        }
        sb.snapshot_every = count_or(r, "simulate", "snapshot_every", sb.snapshot_every);
        if (r.contains("profile")) {
            sb.profile = resolve(base, string_field(r, "simulate", "profile"));
        }
        if (sb.initial == "wave" && !sb.profile) {
            fail("simulate.profile", "is required when initial is \"wave\"");
        }
        if (sb.initial == "invasion" && !(sb.X > 1.0)) {
            fail("simulate.X", "must exceed the initial predator patch [0, 1]");
        }
        cfg.simulate = sb;
    }
    if (doc.contains("validate-kernel")) {
        const json& r = doc.at("validate-kernel");
        check_keys(r, "validate-kernel", {"kernels"});
        ValidateBlock vb;
        if (r.contains("kernels")) {
            const json& ks = r.at("kernels");
            if (!ks.is_array() || ks.empty()) {
                fail("validate-kernel.kernels", "must be a nonempty array");
            }
            vb.kernels.clear();
            for (const auto& k : ks) {
                if (!k.is_string() || (k != "J1" && k != "J2")) {
                    fail("validate-kernel.kernels", "entries must be \"J1\" or \"J2\"");
                }
                vb.kernels.push_back(k.get<std::string>());
            }
        }
        cfg.validate_kernel = vb;
    }
    if (doc.contains("output")) {
        cfg.output = resolve(base, string_field(doc, "", "output"));
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(doc, path.parent_path());
}

nlohmann::ordered_json resolved_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["params"] = {{"a", c.params.a}, {"b", c.params.b}, {"d", c.params.d}};
    j["J1"] = kernel_json(c.J1);
    j["J2"] = kernel_json(c.J2);
    if (c.speed) {
        j["speed"] = nlohmann::ordered_json::object();
    }
    if (c.roots) {
        j["roots"] = speed_json(c.roots->speed);
    }
    if (c.bounds) {
        auto b = nlohmann::ordered_json(speed_json(c.bounds->speed));
        b["grid_span"] = c.bounds->grid_span;
        b["grid_n"] = c.bounds->grid_n;
        b["kink_radius"] = c.bounds->kink_radius;
        j["bounds"] = b;
    }
    if (c.wave) {
        nlohmann::ordered_json w;
        if (c.wave->bundle) {
            w["bundle"] = c.wave->bundle->string();
        } else {
            w = nlohmann::ordered_json(speed_json(c.wave->speed));
        }
        w["L"] = c.wave->L;
        w["n"] = c.wave->n;
        w["tol"] = c.wave->tol;
        w["max_iter"] = c.wave->max_iter;
        w["damping"] = c.wave->damping;
        j["wave"] = w;
    }
    if (c.simulate) {
        const auto& s = *c.simulate;
        nlohmann::ordered_json o{{"initial", s.initial}, {"X", s.X},   {"h", s.h},
                                 {"T", s.T},             {"dt", s.dt}, {"levels", s.levels},
                                 {"skip_fraction", s.skip_fraction},
                                 {"snapshot_every", s.snapshot_every}};
        if (s.profile) {
            o["profile"] = s.profile->string();
        }
        j["simulate"] = o;
    }
    if (c.validate_kernel) {
        j["validate-kernel"] = {{"kernels", c.validate_kernel->kernels}};
    }
    if (c.output) {
        j["output"] = c.output->string();
    }
    return j;
}

}  // namespace nlwave
