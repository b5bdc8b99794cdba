#include "nlwave/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nlwave::io {

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& doc, const char* key) {
    if (!doc.contains(key) || doc.at(key).is_null()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return doc.at(key).get<double>();
}

json extremum(const Extremum& e) { return {{"value", number_or_null(e.value)}, {"z", number_or_null(e.z)}}; }

json span(const ViolationSpan& v) {
    return {{"count", v.count}, {"lo", number_or_null(v.lo)}, {"hi", number_or_null(v.hi)}};
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    return out;
}

}  // namespace

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

json to_json(const ModelParams& p) {
    return {{"a", p.a}, {"b", p.b}, {"d", p.d}, {"a_star", p.a_star()}};
}

json to_json(const SpeedReport& r) {
    json samples = json::array();
    for (const auto& [l, f] : r.objective_samples) {
        samples.push_back({l, f});
    }
    return {{"s_star", r.s_star},
            {"lambda_star", r.lambda_star},
            {"attained", r.attained},
            {"bracket", {r.bracket_lo, r.bracket_hi}},
            {"objective_samples", samples}};
}

json to_json(const RootPair& r) {
    return {{"s", r.s}, {"lambda1", r.lambda1}, {"lambda2", r.lambda2}};
}

json to_json(const BoundsBundle& b) {
    return {{"regime", to_string(b.regime)},
            {"s", b.s},
            {"a", b.params.a},
            {"b", b.params.b},
            {"d", b.params.d},
            {"lambda0", b.lambda0},
            {"lambda1", b.lambda1},
            {"lambda2", b.lambda2},
            {"mu", number_or_null(b.mu)},
            {"q", b.q},
            {"delta", b.delta},
            {"epsilon", b.epsilon},
            {"h", number_or_null(b.h)},
            {"z0", b.z0},
            {"z1", b.z1},
            {"z2", number_or_null(b.z2)},
            {"z3", number_or_null(b.z3)},
            {"z4", number_or_null(b.z4)},
            {"zM", b.zM},
            {"S", number_or_null(b.S)},
            {"kinks", b.kinks()}};
}

BoundsBundle bundle_from_json(const json& doc) {
    BoundsBundle b;
    const std::string regime = doc.at("regime").get<std::string>();
    if (regime == "supercritical") {
        b.regime = Regime::Supercritical;
    } else if (regime == "critical") {
        b.regime = Regime::Critical;
    } else {
        throw std::invalid_argument("bundle: unknown regime '" + regime + "'");
    }
    b.s = doc.at("s").get<double>();
    b.params.a = doc.at("a").get<double>();
    b.params.b = doc.at("b").get<double>();
    b.params.d = doc.at("d").get<double>();
    b.lambda0 = doc.at("lambda0").get<double>();
    b.lambda1 = doc.at("lambda1").get<double>();
    b.lambda2 = doc.at("lambda2").get<double>();
    b.mu = number_from(doc, "mu");
    b.q = doc.at("q").get<double>();
    b.delta = doc.at("delta").get<double>();
    b.epsilon = doc.at("epsilon").get<double>();
    b.h = number_from(doc, "h");
    b.z0 = doc.at("z0").get<double>();
    b.z1 = doc.at("z1").get<double>();
    b.z2 = number_from(doc, "z2");
    b.z3 = number_from(doc, "z3");
    b.z4 = number_from(doc, "z4");
    b.zM = doc.at("zM").get<double>();
    b.S = number_from(doc, "S");
    return b;
}

json to_json(const VerificationReport& r) {
    return {{"pass", r.pass},
            {"tol", r.tol},
            {"ordered", r.ordered},
            {"points_checked", r.points_checked},
            {"max_u1", extremum(r.max_u1)},
            {"max_u2", extremum(r.max_u2)},
            {"min_l1", extremum(r.min_l1)},
            {"min_l2", extremum(r.min_l2)},
            {"violations",
             {{"u1", span(r.u1_violations)},
              {"u2", span(r.u2_violations)},
              {"l1", span(r.l1_violations)},
              {"l2", span(r.l2_violations)}}}};
}

json to_json(const TailReport& t) {
    return {{"phi_minus", t.phi_minus},
            {"phi_plus", t.phi_plus},
            {"psi_minus", t.psi_minus},
            {"psi_plus", t.psi_plus},
            {"right_phi_min", t.right_phi_min},
            {"right_phi_max", t.right_phi_max},
            {"right_psi_max", t.right_psi_max},
            {"left_gap", t.left_gap},
            {"right_gap", t.right_gap},
            {"tol", t.tol},
            {"ordered", t.ordered},
            {"prey_lower_ok", t.prey_lower_ok},
            {"prey_upper_ok", t.prey_upper_ok},
            {"failures", t.failures}};
}

json to_json(const ValidationReport& r) {
    json probes = json::array();
    for (const auto& p : r.probes) {
        probes.push_back({{"lambda", p.lambda},
                          {"value", p.value ? json(*p.value) : json(nullptr)},
                          {"error", p.error}});
    }
    return {{"ok", r.ok()},
            {"normalization_defect", r.normalization_defect},
            {"symmetry_defect", r.symmetry_defect},
            {"min_value", r.min_value},
            {"lambda_hat_consistent", r.lambda_hat_consistent},
            {"probes", probes},
            {"failures", r.failures}};
}

json to_json(const FrontTrace& t) {
    return {{"level", t.level},
            {"samples", t.samples.size()},
            {"speed", t.speed},
            {"fit_window", {t.t_lo, t.t_hi}},
            {"fit_samples", t.fit_samples},
            {"fit_residual", t.fit_residual}};
}

json to_json(const DriftReport& r) {
    return {{"T", r.T},
            {"dt", r.dt},
            {"shift", r.shift},
            {"discrepancy", r.discrepancy},
            {"window", {r.x_lo, r.x_hi}}};
}

json profile_sidecar(const WaveProfile& p) {
    return {{"s", p.s},
            {"params", to_json(p.params)},
            {"regime", to_string(p.regime)},
            {"lambda1", p.lambda1},
            {"shift", p.shift},
            {"beta", p.beta},
            {"grid", {{"x0", p.grid.x0}, {"h", p.grid.h}, {"points", p.grid.n}}},
            {"residual", {{"phi", p.residual.phi}, {"psi", p.residual.psi}}},
            {"iterations", p.iterations},
            {"last_change", p.last_change},
            {"converged", p.converged},
            {"sandwiched", p.sandwiched}};
}

void write_json(const std::filesystem::path& path, const json& doc) {
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return json::parse(in);
}

void write_profile_csv(const std::filesystem::path& path, const WaveProfile& p) {
    auto out = open_out(path);
    out << "z,phi,psi\n";
    for (std::size_t i = 0; i < p.grid.n; ++i) {
        out << format_number(p.grid.x(i)) << ',' << format_number(p.phi[i]) << ','
            << format_number(p.psi[i]) << '\n';
    }
}

WaveProfile read_profile(const std::filesystem::path& csv_path) {
    std::filesystem::path sidecar = csv_path;
    sidecar.replace_extension(".json");
    const json meta = read_json(sidecar);

    WaveProfile p;
    p.s = meta.at("s").get<double>();
    p.params.a = meta.at("params").at("a").get<double>();
    p.params.b = meta.at("params").at("b").get<double>();
    p.params.d = meta.at("params").at("d").get<double>();
    p.regime = meta.at("regime").get<std::string>() == "critical" ? Regime::Critical
                                                                  : Regime::Supercritical;
    p.lambda1 = meta.at("lambda1").get<double>();
    p.shift = meta.at("shift").get<double>();
    p.beta = meta.at("beta").get<double>();
    p.grid.x0 = meta.at("grid").at("x0").get<double>();
    p.grid.h = meta.at("grid").at("h").get<double>();
    p.grid.n = meta.at("grid").at("points").get<std::size_t>();
    p.residual.phi = meta.at("residual").at("phi").get<double>();
    p.residual.psi = meta.at("residual").at("psi").get<double>();
    p.iterations = meta.at("iterations").get<std::size_t>();
    p.last_change = meta.at("last_change").get<double>();
    p.converged = meta.at("converged").get<bool>();
    p.sandwiched = meta.at("sandwiched").get<bool>();

    std::ifstream in(csv_path);
    if (!in) {
        throw std::runtime_error("cannot open " + csv_path.string());
    }
    std::string line;
    std::getline(in, line);
    if (line != "z,phi,psi") {
        throw std::runtime_error(csv_path.string() + ": expected header z,phi,psi");
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string z, phi, psi;
        std::getline(row, z, ',');
        std::getline(row, phi, ',');
        std::getline(row, psi, ',');
        p.phi.push_back(std::stod(phi));
        p.psi.push_back(std::stod(psi));
    }
    if (p.phi.size() != p.grid.n) {
        throw std::runtime_error(csv_path.string() + ": row count does not match the sidecar grid");
    }
    return p;
}

void write_state_csv(const std::filesystem::path& path, const SimState& st) {
    auto out = open_out(path);
    out << "x,U,V\n";
    for (std::size_t i = 0; i < st.grid.n; ++i) {
        out << format_number(st.grid.x(i)) << ',' << format_number(st.U[i]) << ','
            << format_number(st.V[i]) << '\n';
    }
}

void write_front_csv(const std::filesystem::path& path, const FrontTrace& trace) {
    auto out = open_out(path);
    out << "t,x_front\n";
    for (const auto& [t, x] : trace.samples) {
        out << format_number(t) << ',' << format_number(x) << '\n';
    }
}

void write_trajectory(const std::filesystem::path& dir, const Trajectory& tr, json manifest) {
    std::filesystem::create_directories(dir);
    json snaps = json::array();
    for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%05zu.csv", k);
        write_state_csv(dir / name, tr.snapshots[k]);
        snaps.push_back({{"file", name}, {"t", tr.snapshots[k].t}});
    }
    const auto& g = tr.snapshots.front().grid;
    manifest["grid"] = {{"x0", g.x0}, {"h", g.h}, {"points", g.n}};
    manifest["dt"] = tr.dt;
    manifest["dt_max"] = tr.dt_max;
    manifest["steps"] = tr.steps;
    manifest["guard_activations"] = tr.guard_activations;
    manifest["min_U"] = tr.min_U;
    manifest["max_V"] = tr.max_V;
    manifest["snapshots"] = snaps;
    write_json(dir / "manifest.json", manifest);
}

}  // namespace nlwave::io
