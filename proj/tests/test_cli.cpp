#include <doctest.h>

#include <fstream>
#include <iomanip>
#include <sstream>

#include "nlwave/cli.hpp"
#include "nlwave/config.hpp"
#include "nlwave/io.hpp"
#include "nlwave/wave.hpp"
#include "support.hpp"

using namespace nlwave;
using nlohmann::json;

namespace {

json reference_doc() {
    return json::parse(R"({
        "params": {"a": 5, "b": 1, "d": 0.5},
        "J1": {"family": "uniform", "S": 1},
        "speed": {},
        "roots": {"s_factor": 1.2},
        "bounds": {"s_factor": 1.2},
        "wave": {"s_factor": 1.2, "L": 40, "n": 2000, "tol": 1e-7},
        "validate-kernel": {}
    })");
}

std::filesystem::path write_config(const std::filesystem::path& dir, const std::string& name,
                                   const json& doc) {
    const auto path = dir / name;
    std::ofstream(path) << doc.dump(2);
    return path;
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config: defaults, J2 fallback and echo") {
    const RunConfig c = parse_config(reference_doc());
    CHECK(c.params.a == 5.0);
    CHECK(c.J2.family == "uniform");
    CHECK(c.J2.S == 1.0);
    REQUIRE(c.wave.has_value());
    CHECK(c.wave->max_iter == 20000);
    CHECK(c.wave->damping == 0.5);
    CHECK(c.wave->speed.s_factor.value() == 1.2);
    CHECK(c.roots->speed.resolve(2.0) == doctest::Approx(2.4));
    const auto echoed = resolved_json(c);
    CHECK(echoed["J2"]["family"] == "uniform");
    CHECK(echoed["wave"]["L"] == 40.0);
    const RunConfig again = parse_config(json::parse(echoed.dump()));
    CHECK(resolved_json(again).dump() == echoed.dump());
}

TEST_CASE("config: errors name the offending field") {
    auto expect_error = [](json doc, const std::string& field) {
        try {
            parse_config(doc);
            FAIL("expected a ConfigError for " << field);
        } catch (const ConfigError& e) {
            CAPTURE(e.what());
            CHECK(std::string(e.what()).find(field) != std::string::npos);
        }
    };
    json d = reference_doc();
    d["params"]["d"] = -1;
    expect_error(d, "params.d");
    d = reference_doc();
    d["wave"]["colour"] = "blue";
    expect_error(d, "wave.colour");
    d = reference_doc();
    d["extra"] = 1;
    expect_error(d, "extra");
    d = reference_doc();
    d["J1"] = {{"family", "cauchy"}};
    expect_error(d, "J1.family");
    d = reference_doc();
    d["bounds"] = {{"s", "fast"}};
    expect_error(d, "bounds.s");
    d = reference_doc();
    d["roots"] = {{"s", "critical"}};
    expect_error(d, "roots.s");
    d = reference_doc();
    d["simulate"] = {{"initial", "wave"}};
    expect_error(d, "simulate.profile");
    d = reference_doc();
    d.erase("params");
    expect_error(d, "params");
    d = reference_doc();
    d["params"]["a"] = "five";
    expect_error(d, "params.a");
}

TEST_CASE("config: relative paths resolve against the config directory") {
    json d = reference_doc();
    d["J1"] = {{"family", "tabulated"}, {"path", "tables/k.txt"}};
    d["output"] = "results";
    const RunConfig c = parse_config(d, "/data/run1");
    CHECK(c.J1.table == std::filesystem::path("/data/run1/tables/k.txt"));
    CHECK(c.output.value() == std::filesystem::path("/data/run1/results"));
}

TEST_CASE("cli: speed matches the library bit for bit and outputs are deterministic") {
    const auto dir = testing::scratch_dir("cli_speed");
    const auto cfg = write_config(dir, "run.json", reference_doc());
    const Outcome o = invoke({"speed", "--config", cfg.string(), "--out", (dir / "a").string()});
    CHECK(o.code == 0);
    const io::json doc = io::read_json(dir / "a" / "speed.json");
    const SpeedReport sp = minimal_speed({5, 1, 0.5}, Kernel::uniform(1.0));
    CHECK(doc["s_star"].get<double>() == sp.s_star);
    CHECK(doc["lambda_star"].get<double>() == sp.lambda_star);
    CHECK(doc["attained"] == true);
    CHECK(std::filesystem::exists(dir / "a" / "config.resolved.json"));

    CHECK(invoke({"speed", "--config", cfg.string(), "--out", (dir / "b").string(), "--quiet"})
              .code == 0);
    CHECK(slurp(dir / "a" / "speed.json") == slurp(dir / "b" / "speed.json"));
}

TEST_CASE("cli: exit codes") {
    const auto dir = testing::scratch_dir("cli_codes");
    json bad = reference_doc();
    bad["params"]["d"] = -1;
    const Outcome o2 = invoke({"speed", "--config", write_config(dir, "bad.json", bad).string(),
                               "--out", dir.string()});
    CHECK(o2.code == 2);
    CHECK(o2.err.find("params.d") != std::string::npos);

    json low = reference_doc();
    low["roots"] = {{"s", 0.5}};
    const Outcome o3 = invoke({"roots", "--config", write_config(dir, "low.json", low).string(),
                               "--out", dir.string()});
    CHECK(o3.code == 3);
    CHECK(o3.err.find("s* = 0.68283") != std::string::npos);

    json hyp = reference_doc();
    hyp["params"]["d"] = 2.0;
    CHECK(invoke({"bounds", "--config", write_config(dir, "hyp.json", hyp).string(), "--out",
                  dir.string()})
              .code == 3);

    json stall = reference_doc();
    stall["wave"]["max_iter"] = 3;
    const Outcome o4 = invoke({"wave", "--config", write_config(dir, "stall.json", stall).string(),
                               "--out", (dir / "stall").string(), "--quiet"});
    CHECK(o4.code == 4);
    CHECK(std::filesystem::exists(dir / "stall" / "profile.csv"));

    CHECK(invoke({"speed"}).code == 2);
    CHECK(invoke({"frobnicate", "--config", "x.json"}).code == 2);
    CHECK(invoke({"speed", "--config", (dir / "missing.json").string()}).code == 2);
    json nospeed = reference_doc();
    nospeed.erase("speed");
    CHECK(invoke({"speed", "--config", write_config(dir, "ns.json", nospeed).string(), "--out",
                  dir.string()})
              .code == 2);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("cli: tabulated kernel with a declared finite lambda_hat") {
    const auto dir = testing::scratch_dir("cli_table");
    // samples of exp(-2|y|), once raw and once scaled to unit trapezoid mass
    std::vector<double> ys, js;
    double mass = 0.0;
    for (int i = -3000; i <= 3000; ++i) {
        ys.push_back(i * 0.005);
        js.push_back(std::exp(-2.0 * std::abs(ys.back())));
        mass += (i == -3000 || i == 3000 ? 0.5 : 1.0) * 0.005 * js.back();
    }
    auto write_table = [&](const std::string& name, double scale) {
        std::ofstream out(dir / name);
        out << "lambda_hat=2\n" << std::setprecision(17);
        for (std::size_t i = 0; i < ys.size(); ++i) {
            out << ys[i] << ' ' << js[i] * scale << '\n';
        }
    };
    write_table("lap.txt", 1.0 / mass);
    write_table("lap_raw.txt", 1.0);
    json d = reference_doc();
    d["J1"] = {{"family", "tabulated"}, {"path", "lap.txt"}};
    const auto cfg = write_config(dir, "run.json", d);
    const Outcome o = invoke({"speed", "--config", cfg.string(), "--out", (dir / "out").string()});
    CHECK(o.code == 0);
    const io::json doc = io::read_json(dir / "out" / "speed.json");
    CHECK(doc["attained"] == true);
    const double laplace_s = minimal_speed({5, 1, 0.5}, Kernel::laplace(2.0)).s_star;
    CHECK(doc["s_star"].get<double>() == doctest::Approx(laplace_s).epsilon(1e-3));
    CHECK(invoke({"validate-kernel", "--config", cfg.string(), "--out", (dir / "out").string()})
              .code == 0);

    // the raw samples miss unit mass by more than 1e-8, which validate-kernel flags
    d["J1"]["path"] = "lap_raw.txt";
    const auto raw = write_config(dir, "raw.json", d);
    CHECK(invoke({"validate-kernel", "--config", raw.string(), "--out", (dir / "raw").string()})
              .code == 3);
    const io::json report = io::read_json(dir / "raw" / "kernel_report.json");
    CAPTURE(report.dump());
    CHECK(report.dump().find("normalization") != std::string::npos);
}

TEST_CASE("cli: bounds then wave on the written bundle equals the in-process pipeline") {
    const auto dir = testing::scratch_dir("cli_pipeline");
    const auto cfg = write_config(dir, "run.json", reference_doc());
    REQUIRE(invoke({"bounds", "--config", cfg.string(), "--out", (dir / "b").string(), "--quiet"})
                .code == 0);
    const io::json ver = io::read_json(dir / "b" / "verification.json");
    CHECK(ver["pass"] == true);

    json w = reference_doc();
    w["wave"] = {{"bundle", "b/bundle.json"}, {"L", 40}, {"n", 2000}, {"tol", 1e-7}};
    const auto wcfg = write_config(dir, "wave.json", w);
    REQUIRE(invoke({"wave", "--config", wcfg.string(), "--out", (dir / "w").string(), "--quiet"})
                .code == 0);

    const Kernel k = Kernel::uniform(1.0);
    const ModelParams p{5, 1, 0.5};
    const BoundsBundle b =
        construct_supercritical(p, k, k, 1.2 * minimal_speed(p, k).s_star);
    SolveOptions so;
    so.L = 40;
    so.n = 2000;
    so.tol = 1e-7;
    const WaveProfile direct = solve(p, k, k, b, so);
    const WaveProfile loaded = io::read_profile(dir / "w" / "profile.csv");
    REQUIRE(loaded.phi.size() == direct.phi.size());
    CHECK(loaded.phi == direct.phi);
    CHECK(loaded.psi == direct.psi);
    CHECK(loaded.iterations == direct.iterations);
    CHECK(std::filesystem::exists(dir / "w" / "tail.json"));

    json s = reference_doc();
    s["simulate"] = {{"initial", "wave"}, {"profile", "w/profile.csv"}, {"T", 2}};
    const auto scfg = write_config(dir, "sim.json", s);
    REQUIRE(invoke({"simulate", "--config", scfg.string(), "--out", (dir / "s").string(),
                    "--quiet"})
                .code == 0);
    const io::json drift = io::read_json(dir / "s" / "drift.json");
    CHECK(drift["discrepancy"].get<double>() < 0.02);
    CHECK(std::filesystem::exists(dir / "s" / "trajectory" / "manifest.json"));
    CHECK(std::filesystem::exists(dir / "s" / "speed_summary.json"));
    CHECK(std::filesystem::exists(dir / "s" / "front_00.csv"));
}
