#pragma once

// Numerical checks of the structural estimates on computed radial profiles:
// fitted asymptotic decay slopes against the scaling rates, the pointwise
// comparison inequality, ball-energy growth exponents, the Pohozaev identity
// residual, and the radial derivative bound.

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlslab/integrate.hpp"
#include "hlslab/system.hpp"

namespace hlslab {

inline double sphere_area(int n) {
    // |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

namespace detail {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    std::size_t points = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t N = x.size();
    LineFit fit;
    fit.points = N;
    if (N < 2) return fit;
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < N; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / N, my = sy / N;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < N; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const double e = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += e * e;
    }
    fit.rms_residual = std::sqrt(ss / N);
    return fit;
}

}  // namespace detail

struct SlopeReport {
    double r_lo = 0.0, r_hi = 0.0;
    std::vector<double> slope;          // fitted log-log slope per component
    std::vector<double> intercept;      // log-log intercept (limit estimate exp(c))
    std::vector<double> fit_residual;   // RMS per component
    std::vector<std::size_t> nodes_used;
    std::vector<double> predicted;      // -alpha/-beta when available, else NaN
};

// Least-squares slope of log u_i vs log r over [r_lo, r_hi]; defaults to
// [r_end/10, r_end/2]. Requires at least 20 positive nodes per component.
inline SlopeReport fit_decay_slopes(const RadialProfile& prof, double r_lo = 0.0,
                                    double r_hi = 0.0) {
    if (prof.size() < 2) throw std::invalid_argument("fit_decay_slopes: empty profile");
    const double r_end = prof.r.back();
    if (r_lo <= 0.0) r_lo = r_end / 10.0;
    if (r_hi <= 0.0) r_hi = r_end / 2.0;
    if (!(r_lo < r_hi) || r_hi > r_end)
        throw std::invalid_argument("fit_decay_slopes: bad window");

    SlopeReport rep;
    rep.r_lo = r_lo;
    rep.r_hi = r_hi;
    const int L = prof.components();
    rep.predicted.assign(L, std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < L; ++i) {
        std::vector<double> lx, ly;
        for (std::size_t k = 0; k < prof.size(); ++k) {
            const double r = prof.r[k];
            if (r < r_lo || r > r_hi) continue;
            if (!(prof.u[i][k] > 0.0)) continue;
            lx.push_back(std::log(r));
            ly.push_back(std::log(prof.u[i][k]));
        }
        if (lx.size() < 20)
            throw std::invalid_argument("fit_decay_slopes: window too short (< 20 nodes)");
        const auto fit = detail::fit_line(lx, ly);
        rep.slope.push_back(fit.slope);
        rep.intercept.push_back(fit.intercept);
        rep.fit_residual.push_back(fit.rms_residual);
        rep.nodes_used.push_back(fit.points);
    }
    return rep;
}

// Scaling-rate slope predictions (-beta, -alpha per component for a pair;
// -alpha for the scalar case). Meaningful as decay rates in the
// supercritical regime.
inline std::optional<std::vector<double>> predicted_decay_slopes(const SystemSpec& spec) {
    if (auto roles = detect_pair_roles(spec)) {
        std::vector<double> pred(2);
        pred[roles->alpha_index] = -roles->exps.alpha;
        pred[roles->beta_index] = -roles->exps.beta;
        return pred;
    }
    if (auto roles = detect_scalar_roles(spec)) return std::vector<double>{-roles->exps.alpha};
    return std::nullopt;
}

struct ComparisonReport {
    double max_violation = 0.0;      // signed, absolute units
    double scale = 0.0;              // largest magnitude of either side
    double max_violation_rel = 0.0;  // max_violation / scale
    double r_at_max = 0.0;
    std::size_t nodes = 0;
};

// Pointwise comparison inequality on a pair profile with p >= q:
// v^{p+1}/(p+1) <= u^{q+1}/(q+1) where v is the beta-component and u the
// alpha-component. Checked at every stored node where all components are
// positive; the signed worst violation is returned.
inline ComparisonReport check_comparison(const RadialProfile& prof, const PairRoles& roles) {
    if (!(roles.p >= roles.q))
        throw std::invalid_argument("check_comparison: p >= q required (swap roles instead)");
    if (prof.components() != 2) throw std::invalid_argument("check_comparison: pair profile required");
    ComparisonReport rep;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    const auto& v = prof.u[roles.beta_index];
    const auto& u = prof.u[roles.alpha_index];
    for (std::size_t k = 0; k < prof.size(); ++k) {
        if (!(v[k] > 0.0) || !(u[k] > 0.0)) continue;
        const double lhs = std::pow(v[k], roles.p + 1.0) / (roles.p + 1.0);
        const double rhs = std::pow(u[k], roles.q + 1.0) / (roles.q + 1.0);
        const double viol = lhs - rhs;
        if (viol > rep.max_violation) {
            rep.max_violation = viol;
            rep.r_at_max = prof.r[k];
        }
        rep.scale = std::max({rep.scale, lhs, rhs});
        ++rep.nodes;
    }
    if (rep.nodes == 0) throw std::invalid_argument("check_comparison: no positive nodes");
    rep.max_violation_rel = rep.max_violation / (rep.scale + 1e-300);
    return rep;
}

struct EnergyTrack {
    std::string name;
    int component = 0;
    double power = 1.0;
    double fitted_exponent = 0.0;
    double fit_residual = 0.0;
    double bound = std::numeric_limits<double>::quiet_NaN();  // NaN: no bound known
    bool pass = true;  // fitted <= bound + 0.1 (true when no bound applies)
};

struct EnergyReport {
    double r_lo = 0.0, r_hi = 0.0;
    std::vector<EnergyTrack> tracks;
};

namespace detail {

inline EnergyTrack energy_track(const RadialProfile& prof, int comp, double power, double bound,
                                const std::string& name, double r_lo, double r_hi) {
    const int n = prof.n;
    const double area = sphere_area(n);
    std::vector<double> lx, ly;
    double acc = 0.0, g_prev = 0.0;
    for (std::size_t k = 0; k < prof.size(); ++k) {
        const double r = prof.r[k];
        const double uv = std::max(prof.u[comp][k], 0.0);
        const double g = area * std::pow(r, n - 1) * std::pow(uv, power);
        if (k > 0) acc += 0.5 * (r - prof.r[k - 1]) * (g_prev + g);
        g_prev = g;
        if (r >= r_lo && r <= r_hi && acc > 0.0) {
            lx.push_back(std::log(r));
            ly.push_back(std::log(acc));
        }
    }
    EnergyTrack tr;
    tr.name = name;
    tr.component = comp;
    tr.power = power;
    tr.bound = bound;
    if (lx.size() < 20) {
        if (acc == 0.0) return tr;  // identically zero mass: trivially within bound
        throw std::invalid_argument("energy_growth: window too short (< 20 nodes)");
    }
    const auto fit = fit_line(lx, ly);
    tr.fitted_exponent = fit.slope;
    tr.fit_residual = fit.rms_residual;
    tr.pass = std::isnan(bound) || tr.fitted_exponent <= bound + 0.1;
    return tr;
}

}  // namespace detail

// Growth exponents of R -> int_{B_R} u_i and of the source-power integrals,
// fitted over the last decade [r_end/10, r_end], against the ball-energy
// bounds n-alpha, n-beta, n-q*alpha, n-p*beta when the system is a
// recognizable pair (or scalar). Trapezoid on the stored grid.
inline EnergyReport energy_growth(const RadialProfile& prof, const SystemSpec& spec) {
    EnergyReport rep;
    const double r_end = prof.r.back();
    rep.r_lo = r_end / 10.0;
    rep.r_hi = r_end;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    auto pair = detect_pair_roles(spec);
    auto scalar = detect_scalar_roles(spec);
    for (int i = 0; i < prof.components(); ++i) {
        double bound = nan;
        if (pair) bound = spec.n - pair->decay_of(i);
        else if (scalar) bound = spec.n - scalar->exps.alpha;
        rep.tracks.push_back(detail::energy_track(prof, i, 1.0, bound,
                                                  "mass_u" + std::to_string(i + 1), rep.r_lo,
                                                  rep.r_hi));
    }
    if (pair) {
        const int ai = pair->alpha_index, bi = pair->beta_index;
        rep.tracks.push_back(detail::energy_track(
            prof, ai, pair->q, spec.n - pair->q * pair->exps.alpha,
            "power_u" + std::to_string(ai + 1) + "^q", rep.r_lo, rep.r_hi));
        rep.tracks.push_back(detail::energy_track(
            prof, bi, pair->p, spec.n - pair->p * pair->exps.beta,
            "power_u" + std::to_string(bi + 1) + "^p", rep.r_lo, rep.r_hi));
    } else if (scalar) {
        rep.tracks.push_back(detail::energy_track(prof, 0, scalar->p,
                                                  spec.n - scalar->p * scalar->exps.alpha,
                                                  "power_u1^p", rep.r_lo, rep.r_hi));
    }
    return rep;
}

// Fitted growth exponent of R -> int_{B_R} u_comp^s for a user-chosen power;
// reported against a reference exponent by the caller, no verdict attached.
inline EnergyTrack energy_power_probe(const RadialProfile& prof, int comp, double power) {
    const double r_end = prof.r.back();
    return detail::energy_track(prof, comp, power, std::numeric_limits<double>::quiet_NaN(),
                                "s_probe", r_end / 10.0, r_end);
}

// Pohozaev identity residual at a checkpoint R for a pair profile:
//   (n/(p+1) - a1) int_0^R s^{n-1} v^{p+1} + (n/(q+1) - a2) int_0^R s^{n-1} u^{q+1}
//   = R^{n-1} ( R v^{p+1}/(p+1) + R u^{q+1}/(q+1) + R u'v' + a1 u'v + a2 v'u )
// with a2 = n - 2 - a1, u the alpha-component and v the beta-component. The
// residual is |LHS-RHS| relative to the gross magnitude of all terms, which
// stays meaningful when LHS and RHS vanish identically (symmetric critical
// pairs).
inline std::vector<double> pohozaev_residual(const SystemSpec& spec, const RadialProfile& prof,
                                             const PairRoles& roles, double a1,
                                             const std::vector<double>& checkpoints) {
    const int n = prof.n;
    const double p = roles.p, q = roles.q;
    const double a2 = double(n) - 2.0 - a1;
    const double c1 = n / (p + 1.0) - a1;
    const double c2 = n / (q + 1.0) - a2;
    const int vi = roles.beta_index, ui = roles.alpha_index;

    std::vector<double> out;
    std::vector<double> uval, duval;
    for (double R : checkpoints) {
        if (!(R > 0.0) || R > prof.r.back())
            throw std::out_of_range("pohozaev_residual: checkpoint outside profile range");
        double Iv = 0.0, Iu = 0.0;
        double gv_prev = 0.0, gu_prev = 0.0;
        double r_prev = 0.0;
        bool first = true;
        for (std::size_t k = 0; k < prof.size(); ++k) {
            const double r = std::min(prof.r[k], R);
            const bool past = prof.r[k] >= R;
            double vv, uu;
            if (past) {
                eval_profile(spec, prof, R, uval, duval);
                vv = std::max(uval[vi], 0.0);
                uu = std::max(uval[ui], 0.0);
            } else {
                vv = std::max(prof.u[vi][k], 0.0);
                uu = std::max(prof.u[ui][k], 0.0);
            }
            const double w = std::pow(r, n - 1);
            const double gv = w * std::pow(vv, p + 1.0);
            const double gu = w * std::pow(uu, q + 1.0);
            if (!first) {
                Iv += 0.5 * (r - r_prev) * (gv_prev + gv);
                Iu += 0.5 * (r - r_prev) * (gu_prev + gu);
            }
            first = false;
            r_prev = r;
            gv_prev = gv;
            gu_prev = gu;
            if (past) break;
        }

        eval_profile(spec, prof, R, uval, duval);
        const double v = std::max(uval[vi], 0.0), u = std::max(uval[ui], 0.0);
        const double dv = duval[vi], du = duval[ui];
        const double w = std::pow(R, n - 1);
        const double t_v = R * std::pow(v, p + 1.0) / (p + 1.0);
        const double t_u = R * std::pow(u, q + 1.0) / (q + 1.0);
        const double t_cross = R * du * dv;
        const double t_a1 = a1 * du * v;
        const double t_a2 = a2 * dv * u;

        const double lhs = c1 * Iv + c2 * Iu;
        const double rhs = w * (t_v + t_u + t_cross + t_a1 + t_a2);
        const double gross = std::fabs(c1) * Iv + std::fabs(c2) * Iu +
                             w * (t_v + t_u + std::fabs(t_cross) + std::fabs(t_a1) +
                                  std::fabs(t_a2));
        out.push_back(std::fabs(lhs - rhs) / std::max({std::fabs(lhs), std::fabs(rhs), gross,
                                                       1e-300}));
    }
    return out;
}

struct DerivativeBoundReport {
    double max_margin = -std::numeric_limits<double>::infinity();  // signed, absolute units
    double max_margin_rel = 0.0;  // relative to the largest (n-2)u seen
    double r_at_max = 0.0;
};

// -r u_i'(r) <= (n-2) u_i(r), valid along globally positive decaying
// profiles; the signed worst margin over stored nodes is reported.
inline DerivativeBoundReport derivative_bound_margin(const RadialProfile& prof) {
    DerivativeBoundReport rep;
    double scale = 0.0;
    for (int i = 0; i < prof.components(); ++i)
        for (std::size_t k = 0; k < prof.size(); ++k) {
            const double m = -prof.r[k] * prof.du[i][k] - (prof.n - 2) * prof.u[i][k];
            if (m > rep.max_margin) {
                rep.max_margin = m;
                rep.r_at_max = prof.r[k];
            }
            scale = std::max(scale, (prof.n - 2) * prof.u[i][k]);
        }
    rep.max_margin_rel = rep.max_margin / (scale + 1e-300);
    return rep;
}

}  // namespace hlslab
