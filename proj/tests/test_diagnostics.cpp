#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hlslab/diagnostics.hpp"
#include "hlslab/shooting.hpp"
#include "hlslab/system.hpp"

using namespace hlslab;

namespace {

ShotOptions diag_opts(double rmax) {
    ShotOptions o;
    o.rtol = 1e-10;
    o.atol = 1e-12;
    o.r_max = rmax;
    o.store_dr_rel = 1e-3;
    return o;
}

Shot separating_shot(const SystemSpec& spec, double rmax = 1e4) {
    SearchOptions so;
    so.a = 2.0;
    so.shot = diag_opts(rmax);
    auto res = simplex_search(spec, so);
    REQUIRE(res.status == SearchStatus::Separated);
    return std::move(res.shot);
}

}  // namespace

TEST_CASE("decay slope of the bubble approaches -1") {
    const auto shot = integrate_shot(scalar_power(3, 5.0), {1.0}, diag_opts(1e3));
    const auto rep = fit_decay_slopes(shot.profile);
    REQUIRE(rep.slope.size() == 1);
    CHECK(rep.slope[0] == Catch::Approx(-1.0).margin(0.02));
    CHECK(rep.nodes_used[0] >= 20);

    // residual shrinks as the window moves outward into the asymptotic regime
    const auto inner = fit_decay_slopes(shot.profile, 10.0, 50.0);
    const auto outer = fit_decay_slopes(shot.profile, 100.0, 500.0);
    CHECK(outer.fit_residual[0] < inner.fit_residual[0]);

    CHECK_THROWS_AS(fit_decay_slopes(shot.profile, 1.0, 1.0001), std::invalid_argument);
}

TEST_CASE("supercritical slopes match the scaling rates") {
    // symmetric: alpha = beta = 1
    const auto sym = integrate_shot(lane_emden(5, PowerPair(3, 3)), {1.0, 1.0}, diag_opts(1e4));
    REQUIRE(sym.outcome.tag == OutcomeTag::ReachedRmax);
    const auto rs = fit_decay_slopes(sym.profile);
    CHECK(rs.slope[0] == Catch::Approx(-1.0).margin(0.05));
    CHECK(rs.slope[1] == Catch::Approx(-1.0).margin(0.05));

    // asymmetric (5,2,5): u1 ~ r^-beta = r^-4/3, u2 ~ r^-alpha = r^-2/3
    const auto shot = separating_shot(lane_emden(5, PowerPair(2, 5)));
    const auto ra = fit_decay_slopes(shot.profile);
    const auto pred = predicted_decay_slopes(lane_emden(5, PowerPair(2, 5)));
    REQUIRE(pred.has_value());
    CHECK((*pred)[0] == Catch::Approx(-4.0 / 3.0));
    CHECK((*pred)[1] == Catch::Approx(-2.0 / 3.0));
    CHECK(ra.slope[0] == Catch::Approx(-4.0 / 3.0).margin(0.1 * 4.0 / 3.0));
    CHECK(ra.slope[1] == Catch::Approx(-2.0 / 3.0).margin(0.1 * 2.0 / 3.0));
}

TEST_CASE("comparison principle on computed profiles") {
    // p = q with symmetric data: exact equality
    const auto sym = integrate_shot(lane_emden(5, PowerPair(3, 3)), {1.0, 1.0}, diag_opts(1e3));
    const auto roles_sym = *detect_pair_roles(lane_emden(5, PowerPair(3, 3)));
    const auto rep_sym = check_comparison(sym.profile, roles_sym);
    CHECK(std::fabs(rep_sym.max_violation) <= 1e-14 * rep_sym.scale + 1e-300);

    // p = 5 >= q = 2 on the separating shot
    const auto spec = lane_emden(5, PowerPair(5, 2));
    const auto shot = separating_shot(spec);
    const auto rep = check_comparison(shot.profile, *detect_pair_roles(spec));
    CHECK(rep.max_violation <= 1e-8 * rep.scale);

    // artificially swapped components must violate
    Shot swapped = shot;
    std::swap(swapped.profile.u[0], swapped.profile.u[1]);
    const auto bad = check_comparison(swapped.profile, *detect_pair_roles(spec));
    CHECK(bad.max_violation > 1e-3 * bad.scale);

    // p < q is rejected; apply with roles swapped instead
    const auto lt = lane_emden(5, PowerPair(2, 5));
    CHECK_THROWS_AS(check_comparison(shot.profile, *detect_pair_roles(lt)),
                    std::invalid_argument);
}

TEST_CASE("energy growth exponents respect the ball-energy bounds") {
    // bubble: int_{B_R} u ~ R^2 against bound n - alpha = 2.5
    const auto bub = integrate_shot(scalar_power(3, 5.0), {1.0}, diag_opts(1e3));
    const auto rep = energy_growth(bub.profile, scalar_power(3, 5.0));
    REQUIRE(rep.tracks.size() == 2);
    CHECK(rep.tracks[0].fitted_exponent == Catch::Approx(2.0).margin(0.05));
    CHECK(rep.tracks[0].bound == Catch::Approx(2.5));
    for (const auto& t : rep.tracks) CHECK(t.pass);

    // separating shot of (5,5,2): all four bounds tight but satisfied
    const auto spec = lane_emden(5, PowerPair(5, 2));
    const auto shot = separating_shot(spec);
    const auto rp = energy_growth(shot.profile, spec);
    REQUIRE(rp.tracks.size() == 4);
    for (const auto& t : rp.tracks) {
        CHECK(t.pass);
        CHECK(t.fitted_exponent <= t.bound + 0.1);
    }

    // zero profile: trivially within bounds
    const auto z = oracle_shot(lane_emden(3, PowerPair(2, 2)), {0.0, 0.0}, 1e-3, 1.0);
    const auto rz = energy_growth(z.profile, lane_emden(3, PowerPair(2, 2)));
    for (const auto& t : rz.tracks) {
        CHECK(t.pass);
        CHECK(t.fitted_exponent == 0.0);
    }
}

TEST_CASE("Pohozaev residual vanishes on solutions") {
    // symmetric bubble pair, the degenerate critical case: both sides are
    // identically zero for every admissible a1; the gross-scale residual
    // measures quadrature-level agreement
    const auto bp = lane_emden(3, PowerPair(5, 5));
    const auto shot = integrate_shot(bp, {1.0, 1.0}, diag_opts(20.0));
    const auto roles = *detect_pair_roles(bp);
    for (double a1 : {0.0, 0.5, 1.0}) {
        const auto res = pohozaev_residual(bp, shot.profile, roles, a1, {1.0, 2.0, 5.0});
        for (double r : res) CHECK(r <= 1e-6);
    }

    // subcritical crossing shot, checkpoints inside [0, r0): the identity is
    // an integration-by-parts fact for any ODE solution
    const auto le = lane_emden(3, PowerPair(2, 2));
    const auto sub = integrate_shot(le, {1.2, 0.8}, diag_opts(100.0));
    REQUIRE(sub.outcome.tag == OutcomeTag::Crossed);
    const double r0 = sub.outcome.r_event;
    const auto rl = *detect_pair_roles(le);
    for (double a1 : {0.0, 1.0}) {  // n/(p+1) = n-2 = 1 for (3,2,2)
        const auto res =
            pohozaev_residual(le, sub.profile, rl, a1, {0.25 * r0, 0.5 * r0, 0.85 * r0});
        for (double r : res) CHECK(r <= 1e-5);
    }

    // zero profile: both sides vanish
    const auto z = oracle_shot(le, {0.0, 0.0}, 1e-4, 1.0);
    const auto rz = pohozaev_residual(le, z.profile, rl, 0.0, {z.profile.r.back()});
    CHECK(rz[0] == 0.0);

    CHECK_THROWS_AS(pohozaev_residual(le, sub.profile, rl, 0.0, {r0 + 1.0}),
                    std::out_of_range);
}

TEST_CASE("derivative bound holds on decaying profiles, fails past a crossing") {
    const auto bub = integrate_shot(scalar_power(3, 5.0), {1.0}, diag_opts(100.0));
    const auto rep = derivative_bound_margin(bub.profile);
    CHECK(rep.max_margin <= 1e-9);

    // a crossing shot violates it near r0: -r0 u'(r0) > 0 = (n-2) u(r0)
    const auto sub =
        integrate_shot(lane_emden(3, PowerPair(2, 2)), {1.0, 1.0}, diag_opts(100.0));
    REQUIRE(sub.outcome.tag == OutcomeTag::Crossed);
    const auto rep2 = derivative_bound_margin(sub.profile);
    CHECK(rep2.max_margin > 0.0);
}
