#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hlslab/assumptions.hpp"
#include "hlslab/system.hpp"

using namespace hlslab;

TEST_CASE("scaling exponents match the defining formulas") {
    auto e = make_exponents(PowerPair(2.0, 2.0));
    CHECK(e.alpha == Catch::Approx(2.0).epsilon(1e-15));
    CHECK(e.beta == Catch::Approx(2.0).epsilon(1e-15));

    e = make_exponents(PowerPair(2.0, 5.0));
    CHECK(e.alpha == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(e.beta == Catch::Approx(4.0 / 3.0).epsilon(1e-15));

    CHECK_THROWS_AS(make_exponents(PowerPair(1.0, 1.0)), not_applicable);
    CHECK_THROWS_AS(make_exponents(PowerPair(0.5, 1.5)), not_applicable);
}

TEST_CASE("exponent identities p*beta = alpha+2 and q*alpha = beta+2") {
    std::mt19937_64 rng(20240811);
    std::uniform_real_distribution<double> logu(std::log(0.2), std::log(20.0));
    int done = 0;
    while (done < 500) {
        const double p = std::exp(logu(rng));
        const double q = std::exp(logu(rng));
        if (!(p * q > 1.0)) continue;
        ++done;
        const auto e = make_exponents(PowerPair(p, q));
        CHECK(std::fabs(p * e.beta - (e.alpha + 2.0)) <= 1e-12 * (e.alpha + 2.0));
        CHECK(std::fabs(q * e.alpha - (e.beta + 2.0)) <= 1e-12 * (e.beta + 2.0));
    }
}

TEST_CASE("regime classification against the critical hyperbola") {
    CHECK(classify(3, PowerPair(2, 2)).tag == RegimeTag::Subcritical);
    CHECK(classify(3, PowerPair(3, 11)).tag == RegimeTag::Critical);
    CHECK(classify(5, PowerPair(3, 3)).tag == RegimeTag::Supercritical);

    // alpha+beta form agrees: (3,3,11) sits exactly on alpha+beta = n-2 = 1
    const auto reg = classify(3, PowerPair(3, 11));
    CHECK(reg.alpha_plus_beta == Catch::Approx(1.0).epsilon(1e-14));

    CHECK(classify(3, PowerPair(1, 1)).tag == RegimeTag::NotApplicable);
    CHECK(classify(3, PowerPair(2, 2), 2).tag == RegimeTag::NotApplicable);  // n <= 2k
    CHECK(classify(2, PowerPair(2, 2)).tag == RegimeTag::NotApplicable);

    // cascade hyperbola uses (n-2k)/n
    CHECK(classify(5, PowerPair(9, 9), 2).tag == RegimeTag::Critical);
    CHECK(classify(5, PowerPair(10, 10), 2).tag == RegimeTag::Supercritical);
    CHECK(classify(5, PowerPair(3, 3), 2).tag == RegimeTag::Subcritical);
}

TEST_CASE("two classification criteria agree on random samples") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> logu(std::log(0.3), std::log(15.0));
    std::uniform_int_distribution<int> dn(3, 12);
    int done = 0;
    while (done < 300) {
        const double p = std::exp(logu(rng));
        const double q = std::exp(logu(rng));
        if (!(p * q > 1.0)) continue;
        ++done;
        // classify() itself cross-checks the Remark 2.1 form and throws on
        // disagreement, so surviving the call is the assertion.
        const auto reg = classify(dn(rng), PowerPair(p, q));
        CHECK(reg.tag != RegimeTag::NotApplicable);
    }
}

TEST_CASE("lane_emden encodes f1 = u2^q, f2 = u1^p") {
    const auto s = lane_emden(3, PowerPair(2, 2));
    REQUIRE(s.L == 2);
    REQUIRE(s.rhs[0].size() == 1);
    CHECK(s.rhs[0][0].exponents == std::vector<double>{0.0, 2.0});
    CHECK(s.rhs[1][0].exponents == std::vector<double>{2.0, 0.0});

    const auto s2 = lane_emden(5, PowerPair(2, 5));
    CHECK(s2.rhs[0][0].exponents == std::vector<double>{0.0, 5.0});
    CHECK(s2.rhs[1][0].exponents == std::vector<double>{2.0, 0.0});
}

TEST_CASE("polyharmonic cascade layout and k=1 reduction") {
    const auto s = polyharmonic_cascade(5, 2, PowerPair(3, 3));
    REQUIRE(s.L == 4);
    // -Du1 = u2, -Du2 = v1^q, -Dv1 = v2, -Dv2 = u1^p
    CHECK(s.rhs[0][0].exponents == std::vector<double>{0, 1, 0, 0});
    CHECK(s.rhs[1][0].exponents == std::vector<double>{0, 0, 3, 0});
    CHECK(s.rhs[2][0].exponents == std::vector<double>{0, 0, 0, 1});
    CHECK(s.rhs[3][0].exponents == std::vector<double>{3, 0, 0, 0});

    CHECK_THROWS_AS(polyharmonic_cascade(3, 2, PowerPair(3, 3)), not_applicable);
    CHECK_THROWS_AS(polyharmonic_cascade(4, 2, PowerPair(3, 3)), not_applicable);

    const auto k1 = polyharmonic_cascade(4, 1, PowerPair(2.5, 3.5));
    const auto le = lane_emden(4, PowerPair(2.5, 3.5));
    REQUIRE(k1.L == le.L);
    for (int i = 0; i < 2; ++i) {
        CHECK(k1.rhs[i][0].exponents == le.rhs[i][0].exponents);
        CHECK(k1.rhs[i][0].coeff == le.rhs[i][0].coeff);
    }
}

TEST_CASE("eval_rhs on the Lane-Emden pair") {
    const auto s = lane_emden(3, PowerPair(2, 2));
    CHECK(eval_rhs(s, {1.0, 1.0}) == std::vector<double>{1.0, 1.0});
    CHECK(eval_rhs(s, {2.0, 3.0}) == std::vector<double>{9.0, 4.0});

    const auto s5 = lane_emden(3, PowerPair(5, 5));
    const auto f = eval_rhs(s5, {0.5, 0.5});
    CHECK(f[0] == Catch::Approx(1.0 / 32.0).epsilon(1e-15));
    CHECK(f[1] == Catch::Approx(1.0 / 32.0).epsilon(1e-15));

    CHECK_THROWS_AS(eval_rhs(s, {-0.1, 1.0}), std::domain_error);

    // 0^0 = 1: a constant monomial evaluates to its coefficient at 0
    SystemSpec c;
    c.n = 3;
    c.L = 1;
    c.rhs = {{Monomial(2.5, {0.0})}};
    CHECK(eval_rhs(c, {0.0}) == std::vector<double>{2.5});
}

TEST_CASE("pair role detection") {
    const auto roles = detect_pair_roles(lane_emden(5, PowerPair(2, 5)));
    REQUIRE(roles.has_value());
    CHECK(roles->p == 2.0);
    CHECK(roles->q == 5.0);
    // u2 carries the power-p source, decays like r^-alpha
    CHECK(roles->alpha_index == 1);
    CHECK(roles->beta_index == 0);
    CHECK(roles->exps.alpha == Catch::Approx(2.0 / 3.0));
    CHECK(roles->exps.beta == Catch::Approx(4.0 / 3.0));
    CHECK(roles->decay_of(0) == Catch::Approx(4.0 / 3.0));

    CHECK_FALSE(detect_pair_roles(decoupled_pair(3, PowerPair(2, 5))).has_value());
    const auto sc = detect_scalar_roles(scalar_power(3, 5.0));
    REQUIRE(sc.has_value());
    CHECK(sc->exps.alpha == Catch::Approx(0.5));
}

TEST_CASE("assumption probe: coupled pair passes, decoupled pair warns") {
    // Near (0, a): lane-emden numerator |f2| = u1^p -> 0 while the face
    // source f1 = u2^q stays near a^q, so the ratio tends to 0.
    const auto ok = check_assumptions(lane_emden(3, PowerPair(2, 2)), 200, 42);
    CHECK(ok.sum_nonneg_ok);
    CHECK(ok.min_sum >= 0.0);
    for (const auto& f : ok.faces) CHECK(f.bounded);
    CHECK(ok.warnings.empty());

    // Decoupled f1 = u1^p, f2 = u2^q: near (0, a) the numerator stays at a^q
    // while the face source u1^p -> 0; ratio blows up.
    const auto bad = check_assumptions(decoupled_pair(3, PowerPair(7, 2)), 200, 42);
    CHECK(!bad.warnings.empty());
    bool unbounded_seen = false;
    for (const auto& f : bad.faces) unbounded_seen = unbounded_seen || !f.bounded;
    CHECK(unbounded_seen);

    CHECK(check_assumptions(lane_emden(3, PowerPair(2, 2)), 100, 7).sum_nonneg_ok);
}
