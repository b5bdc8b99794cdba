#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "nlwave/errors.hpp"
#include "nlwave/kernels.hpp"
#include "support.hpp"

using namespace nlwave;

namespace {

std::vector<Kernel> all_builtin() {
    return {Kernel::uniform(1.0), Kernel::triangular(1.5), Kernel::truncated_gaussian(0.7, 2.0),
            Kernel::laplace(2.0), Kernel::gaussian(1.0)};
}

double probe_limit(const Kernel& k) {
    return std::isfinite(k.lambda_hat()) ? 0.9 * k.lambda_hat() : 6.0 / k.length_scale();
}

}  // namespace

TEST_CASE("evaluate: point values") {
    CHECK(evaluate(Kernel::uniform(1.0), 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(evaluate(Kernel::uniform(1.0), 2.0) == 0.0);
    CHECK(evaluate(Kernel::laplace(2.0), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(evaluate(Kernel::gaussian(1.0), 0.0) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-14));
    CHECK(evaluate(Kernel::triangular(1.0), 0.5) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("mgf: closed forms at reference points") {
    const Kernel u = Kernel::uniform(1.0);
    CHECK(mgf(u, 0.0) == 1.0);
    CHECK(mgf(u, 1.0) == doctest::Approx(std::sinh(1.0)).epsilon(1e-14));
    CHECK(mgf(Kernel::laplace(2.0), 1.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(mgf(Kernel::gaussian(1.0), 0.0) == 1.0);
    CHECK(mgf(Kernel::laplace(2.0), 0.0) == 1.0);
}

TEST_CASE("mgf_d1 and mgf_d2: reference values") {
    const Kernel u = Kernel::uniform(1.0);
    for (const Kernel& k : all_builtin()) {
        CHECK(std::abs(mgf_d1(k, 0.0)) < 1e-14);
    }
    CHECK(mgf_d1(u, 1.0) == doctest::Approx(std::cosh(1.0) - std::sinh(1.0)).epsilon(1e-13));
    CHECK(mgf_d1(Kernel::gaussian(1.0), 0.5) ==
          doctest::Approx(0.5 * std::exp(0.125)).epsilon(1e-13));
    CHECK(mgf_d2(u, 0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(mgf_d2(Kernel::gaussian(1.0), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mgf_d2(Kernel::laplace(2.0), 0.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("mgf: domain errors at and beyond lambda_hat") {
    const Kernel lap = Kernel::laplace(2.0);
    CHECK(std::isfinite(mgf(lap, 1.999)));
    CHECK_THROWS_AS(mgf(lap, 2.0), DomainError);
    CHECK_THROWS_AS(mgf(lap, -2.5), DomainError);
    CHECK_THROWS_AS(mgf_d1(lap, 2.0), DomainError);
    CHECK_THROWS_AS(mgf_d2(lap, 3.0), DomainError);
    try {
        mgf(lap, 2.0);
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("lambda_hat") != std::string::npos);
    }
}

TEST_CASE("closed forms agree with adaptive quadrature") {
    for (const Kernel& k : {Kernel::uniform(1.0), Kernel::laplace(2.0), Kernel::gaussian(1.0)}) {
        const double top = 0.9 * (std::isfinite(k.lambda_hat()) ? k.lambda_hat() : 5.0);
        for (int i = 1; i <= 30; ++i) {
            const double lambda = top * i / 30.0;
            CAPTURE(k.describe());
            CAPTURE(lambda);
            CHECK(std::abs(mgf(k, lambda) - moment_by_quadrature(k, lambda, 0)) < 1e-8);
            CHECK(std::abs(mgf_d1(k, lambda) - moment_by_quadrature(k, lambda, 1)) < 1e-8);
            CHECK(std::abs(mgf_d2(k, lambda) - moment_by_quadrature(k, lambda, 2)) < 1e-8);
        }
    }
}

TEST_CASE("property: normalization of every built-in family") {
    for (const Kernel& k : all_builtin()) {
        CAPTURE(k.describe());
        CHECK(std::abs(moment_by_quadrature(k, 0.0, 0) - 1.0) < 1e-8);
        CHECK(mgf(k, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("property: I is even, strictly convex, and its derivatives match finite differences") {
    std::mt19937_64 rng(20240611);
    for (const Kernel& k : all_builtin()) {
        CAPTURE(k.describe());
        const double top = probe_limit(k);
        std::uniform_real_distribution<double> pick(1e-3, top);
        for (int trial = 0; trial < 20; ++trial) {
            const double lam = pick(rng);
            CHECK(std::abs(mgf(k, lam) - mgf(k, -lam)) <= 1e-10 * mgf(k, lam));

            double l[3] = {pick(rng), pick(rng), pick(rng)};
            std::sort(l, l + 3);
            if (l[2] - l[0] > 1e-3 && l[1] - l[0] > 1e-4 && l[2] - l[1] > 1e-4) {
                const double chord = ((l[2] - l[1]) * mgf(k, l[0]) + (l[1] - l[0]) * mgf(k, l[2])) /
                                     (l[2] - l[0]);
                CHECK(mgf(k, l[1]) < chord);
            }

            const double step = 1e-5;
            const double fd1 = (mgf(k, lam + step) - mgf(k, lam - step)) / (2 * step);
            const double fd2 =
                (mgf_d1(k, lam + step) - mgf_d1(k, lam - step)) / (2 * step);
            CHECK(std::abs(mgf_d1(k, lam) - fd1) <= 1e-6 * std::abs(mgf_d1(k, lam)));
            CHECK(std::abs(mgf_d2(k, lam) - fd2) <= 1e-6 * std::abs(mgf_d2(k, lam)));
        }
    }
}

TEST_CASE("support and lambda_hat metadata") {
    CHECK(Kernel::uniform(2.0).support_radius().value() == 2.0);
    CHECK_FALSE(Kernel::laplace(1.0).support_radius().has_value());
    CHECK(Kernel::laplace(3.0).lambda_hat() == 3.0);
    CHECK(std::isinf(Kernel::gaussian(1.0).lambda_hat()));
    CHECK(std::isinf(Kernel::uniform(1.0).lambda_hat()));
    const Kernel lap = Kernel::laplace(2.0);
    CHECK(std::exp(-lap.alpha() * lap.effective_radius()) <= 1e-10 * 1.0001);
}

TEST_CASE("validate: built-in kernels pass, Laplace probes record the expected domain error") {
    for (const Kernel& k : all_builtin()) {
        CAPTURE(k.describe());
        const ValidationReport rep = validate(k);
        CHECK(rep.ok());
    }
    const ValidationReport lap = validate(Kernel::laplace(2.0));
    bool saw_near = false;
    bool saw_edge_error = false;
    for (const auto& p : lap.probes) {
        if (std::abs(p.lambda - 1.999) < 1e-12) {
            saw_near = p.value.has_value();
        }
        if (p.lambda == 2.0) {
            saw_edge_error = !p.value && !p.error.empty();
        }
    }
    CHECK(saw_near);
    CHECK(saw_edge_error);
}

TEST_CASE("tabulated kernels: corrections are applied and reported") {
    std::vector<double> y;
    std::vector<double> v;
    for (int i = -100; i <= 100; ++i) {
        y.push_back(i * 0.01);
        v.push_back(0.5 * 0.98);
    }
    const Kernel k = Kernel::tabulated(y, v, std::numeric_limits<double>::infinity());
    const ValidationReport rep = validate(k);
    CHECK(rep.normalization_defect == doctest::Approx(0.02).epsilon(1e-9));
    CHECK_FALSE(rep.ok());
    CHECK(std::abs(moment_by_quadrature(k, 0.0, 0) - 1.0) < 1e-8);

    std::vector<double> skew = v;
    skew[10] *= 2;
    const Kernel k2 = Kernel::tabulated(y, skew, 5.0);
    CHECK(k2.corrections()->raw_symmetry_defect > 0.4);
    CHECK(std::abs(evaluate(k2, y[10]) - evaluate(k2, -y[10])) < 1e-15);
    CHECK(k2.lambda_hat() == 5.0);

    CHECK_THROWS_AS(Kernel::tabulated({-1.0, 0.0, 2.0}, {1, 1, 1}, 1.0), std::invalid_argument);
    CHECK(evaluate(k, 3.0) == 0.0);
}

TEST_CASE("tabulated kernels: file loading") {
    const auto dir = testing::scratch_dir("kernel_table");
    {
        std::ofstream out(dir / "tri.txt");
        out << "lambda_hat=inf\n";
        for (int i = -200; i <= 200; ++i) {
            const double y = i * 0.005;
            out << y << ' ' << std::max(0.0, 1.0 - std::abs(y)) << '\n';
        }
    }
    const Kernel k = Kernel::load_table(dir / "tri.txt");
    CHECK(k.family() == KernelFamily::Tabulated);
    CHECK(std::isinf(k.lambda_hat()));
    CHECK(mgf(k, 1.0) == doctest::Approx(mgf(Kernel::triangular(1.0), 1.0)).epsilon(1e-4));
    CHECK(validate(k).ok());

    {
        std::ofstream out(dir / "bad.txt");
        out << "nonsense\n0 1\n";
    }
    CHECK_THROWS(Kernel::load_table(dir / "bad.txt"));
    CHECK_THROWS(Kernel::load_table(dir / "missing.txt"));
}
