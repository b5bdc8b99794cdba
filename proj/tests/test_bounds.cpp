#include <doctest.h>

#include <cmath>
#include <random>

#include "nlwave/bounds.hpp"
#include "nlwave/errors.hpp"
#include "nlwave/io.hpp"
#include "support.hpp"

using namespace nlwave;
using testing::reference_params;
using testing::unit_uniform;

namespace {

const BoundsBundle& supercritical() {
    static const BoundsBundle b = [] {
        const SpeedReport sp = minimal_speed(reference_params(), unit_uniform());
        return construct_supercritical(reference_params(), unit_uniform(), unit_uniform(),
                                       1.2 * sp.s_star);
    }();
    return b;
}

const BoundsBundle& critical() {
    static const BoundsBundle b =
        construct_critical(reference_params(), unit_uniform(), unit_uniform());
    return b;
}

double continuity_defect(const BoundsBundle& b, double z) {
    const double eps = 1e-13 * std::max(1.0, std::abs(z));
    const BoundValues l = b.eval(z - eps);
    const BoundValues r = b.eval(z + eps);
    const BoundValues m = b.eval(z);
    double worst = 0.0;
    for (const auto& side : {l, r}) {
        worst = std::max({worst, std::abs(side.phi_bar - m.phi_bar),
                          std::abs(side.phi_low - m.phi_low), std::abs(side.psi_bar - m.psi_bar),
                          std::abs(side.psi_low - m.psi_low)});
    }
    return worst;
}

}  // namespace

TEST_CASE("supercritical constants follow the selection rules") {
    const BoundsBundle& b = supercritical();
    const ModelParams p = reference_params();
    CHECK(b.regime == Regime::Supercritical);
    CHECK(b.lambda1 == doctest::Approx(1.46237).epsilon(1e-5));
    CHECK(b.lambda2 == doctest::Approx(3.50532).epsilon(1e-5));
    CHECK(b.mu == doctest::Approx(0.5 * (1.0 + std::min(b.lambda2 / b.lambda1, 2.0))));
    CHECK(b.mu == doctest::Approx(1.5));
    const double A_mu = char_A(p, unit_uniform(), b.mu * b.lambda1, b.s);
    CHECK(b.q == doctest::Approx(2.0 * std::max(1.0, 2.0 * p.b / -A_mu)).epsilon(1e-14));
    CHECK(b.q == doctest::Approx(13.8825).epsilon(1e-5));
    CHECK(b.z0 == doctest::Approx(std::log(b.q) / ((b.mu - 1.0) * b.lambda1)).epsilon(1e-14));
    CHECK(b.zM == doctest::Approx(std::log(b.q * b.mu) / ((b.mu - 1.0) * b.lambda1)).epsilon(1e-14));
    CHECK(b.z1 == doctest::Approx(3.72571).epsilon(1e-5));
    CHECK(b.delta == doctest::Approx(3.84352e-4).epsilon(1e-5));
    CHECK(b.epsilon == doctest::Approx(2.66976e-5).epsilon(1e-5));
    CHECK(b.lambda0 == doctest::Approx(0.731186).epsilon(1e-5));

    CHECK(0.0 < b.z0);
    CHECK(b.z0 < b.z1);
    CHECK(b.z1 < b.zM);
    CHECK(std::abs(supercritical_f(b, b.z1) - b.delta) < 1e-12);
    CHECK(std::abs(supercritical_f(b, b.z0)) < 1e-12);
    CHECK(b.delta == doctest::Approx(0.5 * std::min({supercritical_f(b, b.zM), p.a_star(),
                                                      0.5 * (1.0 - p.d / p.b)})));
    CHECK(p.d < p.b * (1.0 - 2.0 * b.delta));
    CHECK(0.0 < b.epsilon);
    CHECK(b.epsilon < b.delta);
    CHECK(b.delta < 0.5);
    CHECK(b.kinks() == std::vector<double>{0.0, b.z1});
}

TEST_CASE("supercritical: limits, continuity and ordering") {
    const BoundsBundle& b = supercritical();
    const BoundValues left = b.eval(-1e3);
    CHECK(left.phi_bar == doctest::Approx(1.0 - b.epsilon).epsilon(1e-15));
    CHECK(left.phi_low == 0.5);
    CHECK(left.psi_bar == 1.0);
    CHECK(left.psi_low == doctest::Approx(b.delta).epsilon(1e-15));
    const BoundValues right = b.eval(60.0);
    CHECK(std::abs(right.phi_bar - 1.0) < 1e-30);
    CHECK(std::abs(right.phi_low - 1.0) < 1e-30);
    CHECK(right.psi_bar < 1e-30);
    CHECK(right.psi_low < 1e-30);
    for (double z : b.kinks()) {
        CHECK(continuity_defect(b, z) < 1e-12);
    }
}

TEST_CASE("critical constants follow the selection rules") {
    const BoundsBundle& b = critical();
    const ModelParams p = reference_params();
    const SpeedReport sp = minimal_speed(p, unit_uniform());
    CHECK(b.regime == Regime::Critical);
    CHECK(b.s == sp.s_star);
    CHECK(b.lambda1 == sp.lambda_star);
    CHECK(b.S == 1.0);
    CHECK(std::isnan(b.mu));
    CHECK(b.h > b.lambda1 * std::exp(1.0));
    CHECK(b.z1 < 1.0 / b.lambda1);
    CHECK(1.0 / b.lambda1 < b.z2);
    CHECK(b.z2 - b.z1 > b.S);
    CHECK(std::abs(b.h * b.z1 * std::exp(-b.lambda1 * b.z1) - 1.0) < 1e-12);
    CHECK(std::abs(b.h * b.z2 * std::exp(-b.lambda1 * b.z2) - 1.0) < 1e-12);
    CHECK(b.z3 > b.z2);
    CHECK(b.z0 == doctest::Approx((b.q / b.h) * (b.q / b.h)).epsilon(1e-15));
    CHECK(b.z0 > b.z2);
    CHECK(std::abs(critical_g(b, b.z0)) < 1e-12);
    CHECK(b.z0 < b.z4);
    CHECK(b.z4 < b.zM);
    CHECK(std::abs(critical_g(b, b.z4) - b.delta) < 1e-12);
    CHECK(b.delta == doctest::Approx(0.5 * std::min({critical_g(b, b.zM), p.a_star(),
                                                      0.5 * (1.0 - p.d / p.b)})));
    CHECK(0.0 < b.epsilon);
    CHECK(b.epsilon < b.delta);
    CHECK(b.lambda0 < b.lambda1);
    CHECK(char_B(p, unit_uniform(), b.lambda0, b.s) < 0.0);
    CHECK(b.h == doctest::Approx(13.0443).epsilon(1e-5));
    CHECK(b.q == doctest::Approx(28.6929).epsilon(1e-5));
    CHECK(b.kinks() == std::vector<double>{0.0, b.z2, b.z3, b.z4});
}

TEST_CASE("critical: continuity at every kink") {
    const BoundsBundle& b = critical();
    for (double z : b.kinks()) {
        CAPTURE(z);
        CHECK(continuity_defect(b, z) < 1e-12);
    }
    CHECK(b.eval(b.z2).psi_bar == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("property: ordering and range at random points") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pick(-60.0, 60.0);
    for (const BoundsBundle* b : {&supercritical(), &critical()}) {
        for (int i = 0; i < 10000; ++i) {
            const double z = pick(rng);
            const BoundValues v = b->eval(z);
            REQUIRE(v.phi_low <= v.phi_bar);
            REQUIRE(v.psi_low <= v.psi_bar);
            REQUIRE(v.phi_low >= 0.5);
            REQUIRE(v.phi_bar <= 1.0);
            REQUIRE(v.psi_low >= 0.0);
            REQUIRE(v.psi_bar <= 1.0);
        }
    }
}

TEST_CASE("derivatives agree with difference quotients away from kinks") {
    for (const BoundsBundle* b : {&supercritical(), &critical()}) {
        for (double z : {-3.0, 0.4, 2.0, 3.3, 4.4, 7.5, 12.0}) {
            const double step = 1e-6;
            const BoundValues d = b->derivative(z);
            const BoundValues hi = b->eval(z + step);
            const BoundValues lo = b->eval(z - step);
            CHECK(d.phi_bar == doctest::Approx((hi.phi_bar - lo.phi_bar) / (2 * step)).epsilon(1e-5));
            CHECK(d.psi_bar == doctest::Approx((hi.psi_bar - lo.psi_bar) / (2 * step)).epsilon(1e-5));
            CHECK(d.phi_low == doctest::Approx((hi.phi_low - lo.phi_low) / (2 * step)).epsilon(1e-5));
            CHECK(d.psi_low == doctest::Approx((hi.psi_low - lo.psi_low) / (2 * step)).epsilon(1e-5));
        }
    }
}

TEST_CASE("verify: both reference bundles satisfy the four inequalities") {
    for (const BoundsBundle* b : {&supercritical(), &critical()}) {
        const VerificationReport rep = verify(*b, unit_uniform(), unit_uniform());
        CAPTURE(to_string(b->regime));
        CHECK(rep.pass);
        CHECK(rep.ordered);
        CHECK(rep.max_u1.value <= 1e-9);
        CHECK(rep.max_u2.value <= 1e-9);
        CHECK(rep.min_l1.value >= -1e-9);
        CHECK(rep.min_l2.value >= -1e-9);
        CHECK(rep.points_checked > 19000);
    }
}

TEST_CASE("supercritical: the upper predator inequality is driven by A(lambda1) = 0 on z > 0") {
    const BoundsBundle& b = supercritical();
    for (double z : {0.5, 2.0, 5.0, 10.0, 20.0}) {
        CHECK(inequalities_at(b, unit_uniform(), unit_uniform(), z).u2 <= 1e-12);
    }
}

TEST_CASE("verify: a delta above its cap produces a localized lower predator violation") {
    BoundsBundle bad = supercritical();
    const ModelParams p = reference_params();
    bad.delta = 1.1 * (1.0 - p.d / p.b);
    const VerificationReport rep = verify(bad, unit_uniform(), unit_uniform());
    CHECK_FALSE(rep.pass);
    CHECK(rep.min_l2.value < -1e-9);
    CHECK(rep.l2_violations.count > 0);
    // confined to the plateau where the lower predator sits at delta, left of z0
    CHECK(rep.l2_violations.hi < bad.z0);
    CHECK(rep.max_u1.value <= 1e-9);
    CHECK(rep.max_u2.value <= 1e-9);
    CHECK(rep.min_l1.value >= -1e-9);
}

TEST_CASE("construction preconditions") {
    const Kernel u = unit_uniform();
    const double s_star = minimal_speed(reference_params(), u).s_star;
    CHECK_THROWS_AS(construct_supercritical({3.0, 1.0, 0.5}, u, u, 1.0), PreconditionError);
    CHECK_THROWS_AS(construct_supercritical({5.0, 1.0, 1.0}, u, u, 1.0), PreconditionError);
    CHECK_THROWS_AS(construct_supercritical(reference_params(), u, u, 0.9 * s_star),
                    PreconditionError);
    try {
        construct_critical(reference_params(), u, Kernel::gaussian(0.5));
        FAIL("expected an error");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("compact support") != std::string::npos);
    }
}

TEST_CASE("bundle documents round-trip exactly") {
    for (const BoundsBundle* b : {&supercritical(), &critical()}) {
        const std::string text = io::to_json(*b).dump();
        const BoundsBundle back = io::bundle_from_json(io::json::parse(text));
        CHECK(back.regime == b->regime);
        CHECK(back.params == b->params);
        const double fields[][2] = {{back.s, b->s},           {back.q, b->q},
                                    {back.delta, b->delta},   {back.epsilon, b->epsilon},
                                    {back.lambda0, b->lambda0}, {back.lambda1, b->lambda1},
                                    {back.z0, b->z0},         {back.z1, b->z1},
                                    {back.zM, b->zM}};
        for (const auto& f : fields) {
            CHECK(f[0] == f[1]);
        }
        CHECK((std::isnan(back.mu) ? std::isnan(b->mu) : back.mu == b->mu));
        CHECK((std::isnan(back.z4) ? std::isnan(b->z4) : back.z4 == b->z4));
        for (double z : {-5.0, 0.7, 3.9, 4.9, 30.0}) {
            CHECK(back.eval(z).psi_low == b->eval(z).psi_low);
        }
    }
    const io::json doc = io::to_json(supercritical());
    for (const char* key : {"regime", "s", "a", "b", "d", "lambda0", "lambda1", "lambda2", "mu",
                            "q", "delta", "epsilon", "h", "z0", "z1", "z2", "z3", "z4", "zM", "S"}) {
        CHECK(doc.contains(key));
    }
    CHECK(doc["h"].is_null());
}
