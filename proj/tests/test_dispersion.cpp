#include <doctest.h>

#include <cmath>
#include <random>

#include "nlwave/dispersion.hpp"
#include "nlwave/errors.hpp"
#include "support.hpp"

using namespace nlwave;
using testing::reference_params;
using testing::unit_uniform;

namespace {

/// Dense scan of F on (lo, hi); returns the smallest sampled value.
double scan_min(const ModelParams& p, const Kernel& k2, double lo, double hi, std::size_t n) {
    double best = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        const double lambda = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        best = std::min(best, speed_objective(p, k2, lambda));
    }
    return best;
}

}  // namespace

TEST_CASE("reference minimal speed") {
    const SpeedReport sp = minimal_speed(reference_params(), unit_uniform());
    CHECK(sp.attained);
    CHECK(sp.s_star == doctest::Approx(0.68283234802866).epsilon(1e-12));
    CHECK(sp.lambda_star == doctest::Approx(2.39935728051547).epsilon(1e-9));
    CHECK(sp.bracket_lo < sp.lambda_star);
    CHECK(sp.lambda_star < sp.bracket_hi);
    for (const auto& [l, f] : sp.objective_samples) {
        CHECK(f >= sp.s_star - 1e-9);
    }
    CHECK(std::abs(speed_objective(reference_params(), unit_uniform(), sp.lambda_star) - sp.s_star) <
          1e-12);
}

TEST_CASE("double-root identity at (s*, lambda*)") {
    const ModelParams p = reference_params();
    const Kernel k = unit_uniform();
    const SpeedReport sp = minimal_speed(p, k);
    CHECK(std::abs(char_A(p, k, sp.lambda_star, sp.s_star)) <= 1e-8);
    CHECK(std::abs(p.d * mgf_d1(k, sp.lambda_star) - sp.s_star) <= 1e-8);
}

TEST_CASE("char_A and char_B: examples") {
    const ModelParams p = reference_params();
    const Kernel k = unit_uniform();
    CHECK(char_A(p, k, 0.0, 0.7) == p.b);
    CHECK(char_A(p, k, 1.3, 0.0) > 0.0);
    CHECK(char_B(p, k, 0.0, 0.7) == 0.0);
    CHECK(char_B(p, k, 1e-3, 0.7) < 0.0);
    CHECK(char_B(p, k, 1.0, 0.0) == doctest::Approx(std::sinh(1.0) - 1.0).epsilon(1e-13));
    CHECK_THROWS_AS(char_A(p, Kernel::laplace(1.0), 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(char_B(p, Kernel::laplace(1.0), 2.0, 0.5), DomainError);
}

TEST_CASE("property: F(lambda) lambda equals d[I2 - 1] + b") {
    const ModelParams p = reference_params();
    for (const Kernel& k : {unit_uniform(), Kernel::laplace(3.0), Kernel::gaussian(0.7)}) {
        for (double lambda : {0.01, 0.3, 1.0, 2.2}) {
            const double lhs = speed_objective(p, k, lambda) * lambda;
            const double rhs = p.d * (mgf(k, lambda) - 1.0) + p.b;
            CHECK(std::abs(lhs - rhs) < 1e-13 * std::max(1.0, rhs));
        }
    }
}

TEST_CASE("property: A is convex in lambda with A(0) = b") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pick(0.0, 6.0);
    const ModelParams p = reference_params();
    const Kernel k = unit_uniform();
    for (int i = 0; i < 50; ++i) {
        const double s = 0.1 + pick(rng) / 3.0;
        double l[3] = {pick(rng), pick(rng), pick(rng)};
        std::sort(l, l + 3);
        if (l[2] - l[0] < 1e-2) continue;
        const double chord = ((l[2] - l[1]) * char_A(p, k, l[0], s) +
                              (l[1] - l[0]) * char_A(p, k, l[2], s)) / (l[2] - l[0]);
        CHECK(char_A(p, k, l[1], s) <= chord + 1e-12);
        CHECK(char_A(p, k, 0.0, s) == p.b);
    }
}

TEST_CASE("property: minimal speed matches a dense grid scan and is monotone in b and d") {
    const Kernel k = unit_uniform();
    double prev_b[3] = {0, 0, 0};
    for (double b : {0.8, 1.0, 1.5}) {
        double prev_d = 0.0;
        int j = 0;
        for (double d : {0.2, 0.4, 0.7}) {
            const ModelParams p{5.0, b, d};
            const SpeedReport sp = minimal_speed(p, k);
            const double oracle = scan_min(p, k, 1e-3, 12.0, 200000);
            CHECK(sp.s_star <= oracle + 1e-10);
            CHECK(sp.s_star >= oracle - 1e-6);
            CHECK(sp.s_star > prev_d);
            CHECK(sp.s_star > prev_b[j]);
            prev_d = sp.s_star;
            prev_b[j++] = sp.s_star;
        }
    }
}

TEST_CASE("s* does not depend on a") {
    const Kernel k = unit_uniform();
    const double s1 = minimal_speed({5.0, 1.0, 0.5}, k).s_star;
    const double s2 = minimal_speed({9.0, 1.0, 0.5}, k).s_star;
    CHECK(s1 == s2);
}

TEST_CASE("Laplace kernel: the minimiser stays below lambda_hat") {
    const ModelParams p = reference_params();
    const Kernel k = Kernel::laplace(2.0);
    const SpeedReport sp = minimal_speed(p, k);
    CHECK(sp.attained);
    CHECK(sp.lambda_star < 2.0);
    CHECK(std::abs(p.d * mgf_d1(k, sp.lambda_star) - sp.s_star) < 1e-8);
    CHECK(sp.s_star <= scan_min(p, k, 1e-3, 1.9999, 200000) + 1e-10);
}

TEST_CASE("a_roots: root pair for s > s*") {
    const ModelParams p = reference_params();
    const Kernel k = unit_uniform();
    const SpeedReport sp = minimal_speed(p, k);
    const RootPair r = a_roots(p, k, 1.2 * sp.s_star, sp);
    CHECK(r.lambda1 == doctest::Approx(1.46237).epsilon(1e-5));
    CHECK(r.lambda2 == doctest::Approx(3.50532).epsilon(1e-5));
    CHECK(0.0 < r.lambda1);
    CHECK(r.lambda1 < r.lambda2);
    CHECK(std::abs(char_A(p, k, r.lambda1, r.s)) < 1e-10);
    CHECK(std::abs(char_A(p, k, r.lambda2, r.s)) < 1e-10);
    for (int i = 1; i <= 10; ++i) {
        const double l = r.lambda1 + (r.lambda2 - r.lambda1) * i / 11.0;
        CHECK(char_A(p, k, l, r.s) < 0.0);
    }
    CHECK(char_A(p, k, r.lambda1 / 2.0, r.s) > 0.0);
    CHECK(char_A(p, k, r.lambda2 + 1.0, r.s) > 0.0);
}

TEST_CASE("a_roots: limits and errors") {
    const ModelParams p = reference_params();
    const Kernel k = unit_uniform();
    const SpeedReport sp = minimal_speed(p, k);

    const RootPair near = a_roots(p, k, sp.s_star * (1.0 + 1e-6), sp);
    CHECK(near.lambda2 - near.lambda1 < 0.1 * sp.lambda_star);

    const RootPair fast = a_roots(p, k, 10.0 * sp.s_star, sp);
    CHECK(std::abs(fast.lambda1 - p.b / fast.s) < 0.1 * p.b / fast.s);

    CHECK_THROWS_AS(a_roots(p, k, sp.s_star, sp), PreconditionError);
    try {
        a_roots(p, k, 0.5, sp);
        FAIL("expected an error");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("minimal_speed") != std::string::npos);
    }
}

TEST_CASE("choose_lambda0") {
    const ModelParams p = reference_params();
    const Kernel k = unit_uniform();
    const SpeedReport sp = minimal_speed(p, k);
    const double s = 1.2 * sp.s_star;
    const RootPair r = a_roots(p, k, s, sp);
    const double l0 = choose_lambda0(p, k, s, r.lambda1);
    CHECK(char_B(p, k, l0, s) < 0.0);
    CHECK(l0 < r.lambda1);
    CHECK(l0 == doctest::Approx(r.lambda1 / 2.0));

    const double l0c = choose_lambda0(p, k, sp.s_star, sp.lambda_star);
    CHECK(char_B(p, k, l0c, sp.s_star) < 0.0);
    CHECK(l0c < sp.lambda_star);
}

TEST_CASE("critical detection and parameter hypotheses") {
    CHECK(is_critical(1.0, 1.0 + 5e-13));
    CHECK_FALSE(is_critical(1.0, 1.0 + 1e-9));
    CHECK_THROWS_AS((ModelParams{5, 1, -1}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ModelParams{3, 1, 0.5}.require_wave_hypotheses()), PreconditionError);
    CHECK_THROWS_AS((ModelParams{5, 1, 1}.require_wave_hypotheses()), PreconditionError);
    CHECK_NOTHROW((ModelParams{4, 1, 0.5}.require_wave_hypotheses()));
    CHECK(ModelParams{5, 1, 0.5}.a_star() == doctest::Approx(0.8));
}

TEST_CASE("non-attainment is reported when F decreases over the whole probe range") {
    // a tabulated uniform density with a declared lambda_hat far below the minimiser of
    // the untruncated objective (about 2.4)
    std::vector<double> y;
    std::vector<double> v;
    for (int i = -100; i <= 100; ++i) {
        y.push_back(i * 0.01);
        v.push_back(0.5);
    }
    const Kernel k = Kernel::tabulated(y, v, 1.0);
    const SpeedReport sp = minimal_speed(reference_params(), k);
    CHECK_FALSE(sp.attained);
    CHECK(sp.bracket_hi == doctest::Approx(0.999));
    CHECK_THROWS_AS(a_roots(reference_params(), k, 1.0, sp), PreconditionError);
}
