#pragma once

// The target map psi sending an initial value to the first boundary point of
// the positive cone reached by the radial flow, and the search for the
// separating initial value on the simplex A_a = {sum alpha_i = a} whose shot
// stays positive. Crossing-component labels drive a bisection (L = 2) or a
// longest-edge simplex subdivision (L > 2, best effort).

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlslab/integrate.hpp"
#include "hlslab/system.hpp"

namespace hlslab {

class target_map_error : public std::runtime_error {
public:
    explicit target_map_error(const std::string& what) : std::runtime_error(what) {}
};

struct TargetPoint {
    std::vector<double> point;
    bool boundary_fixed = false;  // alpha was on the cone boundary: psi(alpha) = alpha
    bool indeterminate = false;   // truncated at r_max while still positive
    ShotOutcome source_outcome;
};

inline TargetPoint target_map(const SystemSpec& spec, const InitialValue& alpha,
                              const ShotOptions& opts) {
    for (double a : alpha)
        if (!(a >= 0.0)) throw std::invalid_argument("target_map: alpha outside the closed cone");
    TargetPoint tp;
    bool boundary = false;
    for (double a : alpha) boundary = boundary || a == 0.0;
    if (boundary) {
        tp.point = alpha;
        tp.boundary_fixed = true;
        return tp;
    }
    Shot shot = integrate_shot(spec, alpha, opts);
    tp.source_outcome = shot.outcome;
    switch (shot.outcome.tag) {
        case OutcomeTag::Crossed:
            tp.point = shot.outcome.terminal_u;
            tp.point[shot.outcome.component] = 0.0;
            for (double& v : tp.point) v = std::max(v, 0.0);
            break;
        case OutcomeTag::Decayed:
            tp.point.assign(alpha.size(), 0.0);
            break;
        case OutcomeTag::ReachedRmax:
            tp.point = shot.outcome.terminal_u;
            tp.indeterminate = true;
            break;
        case OutcomeTag::Blowup:
            throw target_map_error("target_map: shot blew up at r = " +
                                   std::to_string(shot.outcome.r_event));
    }
    return tp;
}

enum class SearchStatus { Separated, IndeterminateBracket, NoSeparation };

inline const char* to_string(SearchStatus s) {
    switch (s) {
        case SearchStatus::Separated: return "separated";
        case SearchStatus::IndeterminateBracket: return "indeterminate-bracket";
        default: return "no-separation";
    }
}

struct SearchOptions {
    double a = 2.0;
    double t_tol = 1e-12;      // bracket tolerance on the simplex parameter
    double t_edge = 1e-3;      // inset of the initial probes from the corners
    double label_rmax = 1e9;   // integration range for labeling shots
    int max_labels = 400;
    int max_depth = 60;        // subdivision depth cap (L > 2)
    ShotOptions shot;          // options for the returned representative shot
};

struct LabelProbe {
    double t;
    int label;  // crossing component, or -1 for positive-to-the-end cells
};

struct GroundStateResult {
    SearchStatus status = SearchStatus::NoSeparation;
    double a = 0.0;
    double t_star = std::numeric_limits<double>::quiet_NaN();
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double bracket_width = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> alpha_star;
    Shot shot;                       // shot from alpha_star at user options
    int label_lo = -1, label_hi = -1;
    std::vector<LabelProbe> probes;  // labeling history, in evaluation order
};

namespace detail {

// Crossing-component label of the shot from t on A_a; -1 if the shot is
// still positive at label_rmax (or has decayed) -- a separating cell.
inline int shot_label(const SystemSpec& spec, double t, const SearchOptions& so) {
    ShotOptions lo = so.shot;
    lo.r_max = std::max(so.label_rmax, so.shot.r_max);
    lo.store_stride = 1 << 30;  // labeling shots keep essentially no profile
    lo.store_dr_rel = 0.0;
    const InitialValue alpha = {t * so.a, (1.0 - t) * so.a};
    const Shot s = integrate_shot(spec, alpha, lo);
    return s.outcome.tag == OutcomeTag::Crossed ? s.outcome.component : -1;
}

}  // namespace detail

// Two-component search: parametrize A_a by alpha(t) = (t a, (1-t) a), label
// each t by the first-crossing component and bisect the label change. Cells
// positive out to label_rmax separate the labels; the bracket then encloses
// the positive zone by bisecting each edge.
inline GroundStateResult simplex_search_pair(const SystemSpec& spec, const SearchOptions& so) {
    if (spec.L != 2) throw std::invalid_argument("simplex_search_pair: L = 2 required");
    if (!(so.a > 0.0)) throw std::invalid_argument("simplex_search_pair: a > 0 required");

    GroundStateResult res;
    res.a = so.a;
    int budget = so.max_labels;
    auto label = [&](double t) {
        if (--budget < 0) throw std::runtime_error("simplex_search: label budget exhausted");
        const int l = detail::shot_label(spec, t, so);
        res.probes.push_back({t, l});
        return l;
    };

    double lo = so.t_edge, hi = 1.0 - so.t_edge;
    int Llo = label(lo), Lhi = label(hi);
    res.label_lo = Llo;
    res.label_hi = Lhi;

    if (Llo == Lhi || Llo < 0 || Lhi < 0) {
        // No crossing-label change between the end probes: either evidence
        // against a separating value, or the probes themselves are already
        // positive cells. Report as-is.
        res.status = SearchStatus::NoSeparation;
        res.bracket_lo = lo;
        res.bracket_hi = hi;
        res.bracket_width = hi - lo;
        res.t_star = 0.5 * (lo + hi);
        res.alpha_star = {res.t_star * so.a, (1.0 - res.t_star) * so.a};
        res.shot = integrate_shot(spec, res.alpha_star, so.shot);
        return res;
    }

    // Pure bisection while every probe crosses; switch to edge enclosure the
    // moment an indeterminate (positive) cell shows up.
    bool zone_mode = false;
    double zlo = lo, zhi = hi;  // in zone mode: [last Llo t, first Lhi t]
    while (hi - lo > so.t_tol) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;  // resolution floor
        const int lm = label(mid);
        if (lm == Llo) {
            lo = mid;
        } else if (lm == Lhi) {
            hi = mid;
        } else {
            zone_mode = true;
            // left edge: largest t still labeled Llo
            double a0 = lo, b0 = mid;
            while (b0 - a0 > so.t_tol) {
                const double m2 = 0.5 * (a0 + b0);
                if (!(m2 > a0 && m2 < b0)) break;
                if (label(m2) == Llo) a0 = m2;
                else b0 = m2;
            }
            // right edge: smallest t already labeled Lhi
            double a1 = mid, b1 = hi;
            while (b1 - a1 > so.t_tol) {
                const double m2 = 0.5 * (a1 + b1);
                if (!(m2 > a1 && m2 < b1)) break;
                if (label(m2) == Lhi) b1 = m2;
                else a1 = m2;
            }
            zlo = a0;
            zhi = b1;
            break;
        }
    }
    if (!zone_mode) {
        zlo = lo;
        zhi = hi;
    }

    res.bracket_lo = zlo;
    res.bracket_hi = zhi;
    res.bracket_width = zhi - zlo;
    res.t_star = 0.5 * (zlo + zhi);
    res.alpha_star = {res.t_star * so.a, (1.0 - res.t_star) * so.a};
    res.shot = integrate_shot(spec, res.alpha_star, so.shot);
    res.status = res.shot.outcome.tag == OutcomeTag::Crossed ? SearchStatus::IndeterminateBracket
                                                             : SearchStatus::Separated;
    return res;
}

// L > 2: longest-edge subdivision of a simplex in A_a, keeping the child
// whose vertex labels cover the most crossing components. Best effort; the
// acceptance-grade searches are all L = 2.
inline GroundStateResult simplex_search_multi(const SystemSpec& spec, const SearchOptions& so) {
    const int L = spec.L;
    GroundStateResult res;
    res.a = so.a;
    int budget = so.max_labels;

    auto label_of = [&](const std::vector<double>& alpha) {
        if (--budget < 0) throw std::runtime_error("simplex_search: label budget exhausted");
        ShotOptions lo = so.shot;
        lo.r_max = std::max(so.label_rmax, so.shot.r_max);
        lo.store_stride = 1 << 30;
        lo.store_dr_rel = 0.0;
        const Shot s = integrate_shot(spec, alpha, lo);
        return s.outcome.tag == OutcomeTag::Crossed ? s.outcome.component : -1;
    };

    // inset corners of A_a
    const double eta = so.t_edge;
    std::vector<std::vector<double>> verts(L, std::vector<double>(L, eta * so.a));
    for (int j = 0; j < L; ++j) verts[j][j] = so.a * (1.0 - (L - 1) * eta);
    std::vector<int> labels(L);
    for (int j = 0; j < L; ++j) labels[j] = label_of(verts[j]);

    auto distinct = [&](const std::vector<int>& ls) {
        std::vector<int> seen;
        for (int l : ls)
            if (l >= 0 && std::find(seen.begin(), seen.end(), l) == seen.end()) seen.push_back(l);
        return int(seen.size());
    };
    if (distinct(labels) <= 1) {
        res.status = SearchStatus::NoSeparation;
        res.label_lo = labels[0];
    }

    double diam = 0.0;
    auto diameter = [&]() {
        double d = 0.0;
        for (int i = 0; i < L; ++i)
            for (int j = i + 1; j < L; ++j) {
                double s = 0.0;
                for (int c = 0; c < L; ++c)
                    s += (verts[i][c] - verts[j][c]) * (verts[i][c] - verts[j][c]);
                d = std::max(d, std::sqrt(s));
            }
        return d;
    };

    for (int depth = 0; depth < so.max_depth; ++depth) {
        diam = diameter();
        if (diam <= so.t_tol * so.a) break;
        // split the longest edge
        int ei = 0, ej = 1;
        double best = -1.0;
        for (int i = 0; i < L; ++i)
            for (int j = i + 1; j < L; ++j) {
                double s = 0.0;
                for (int c = 0; c < L; ++c)
                    s += (verts[i][c] - verts[j][c]) * (verts[i][c] - verts[j][c]);
                if (s > best) {
                    best = s;
                    ei = i;
                    ej = j;
                }
            }
        std::vector<double> mid(L);
        for (int c = 0; c < L; ++c) mid[c] = 0.5 * (verts[ei][c] + verts[ej][c]);
        const int lm = label_of(mid);
        // two children: replace ei or ej by the midpoint; keep better coverage
        std::vector<int> la = labels, lb = labels;
        la[ei] = lm;
        lb[ej] = lm;
        const int ca = distinct(la), cb = distinct(lb);
        if (ca >= cb) {
            verts[ei] = mid;
            labels = la;
        } else {
            verts[ej] = mid;
            labels = lb;
        }
    }

    res.alpha_star.assign(L, 0.0);
    for (int j = 0; j < L; ++j)
        for (int c = 0; c < L; ++c) res.alpha_star[c] += verts[j][c] / L;
    res.bracket_width = diameter() / so.a;
    res.shot = integrate_shot(spec, res.alpha_star, so.shot);
    if (res.status != SearchStatus::NoSeparation)
        res.status = res.shot.outcome.tag == OutcomeTag::Crossed
                         ? SearchStatus::IndeterminateBracket
                         : SearchStatus::Separated;
    return res;
}

inline GroundStateResult simplex_search(const SystemSpec& spec, const SearchOptions& so) {
    spec.validate();
    return spec.L == 2 ? simplex_search_pair(spec, so) : simplex_search_multi(spec, so);
}

struct ScanRow {
    std::vector<double> alpha;
    OutcomeTag outcome = OutcomeTag::ReachedRmax;
    int component = -1;
    double r0 = std::numeric_limits<double>::infinity();  // infinity marker if not crossed
    double collapse_residual = std::numeric_limits<double>::quiet_NaN();
};

struct ScanTable {
    std::vector<ScanRow> rows;
    double lambda = 0.0;  // > 0 if the scaling-collapse column was computed
};

// First-zero radii over a set of interior initial values. With lambda > 0
// and a recognizable pair system, each row also reports the scaling-collapse
// residual |lambda * r0(scaled alpha) - r0| / r0 where scaled alpha is
// (lambda^beta a_1, lambda^alpha a_2), the scaling weights of the pair.
inline ScanTable dirichlet_scan(const SystemSpec& spec, const std::vector<InitialValue>& alphas,
                                const ShotOptions& opts, double lambda = 0.0) {
    spec.validate();
    ScanTable table;
    table.lambda = lambda;
    const auto roles = detect_pair_roles(spec);
    for (const auto& alpha : alphas) {
        for (double a : alpha)
            if (!(a > 0.0)) throw std::invalid_argument("dirichlet_scan: interior alpha required");
        ScanRow row;
        row.alpha = alpha;
        const Shot s = integrate_shot(spec, alpha, opts);
        row.outcome = s.outcome.tag;
        if (s.outcome.tag == OutcomeTag::Crossed) {
            row.component = s.outcome.component;
            row.r0 = s.outcome.r_event;
            if (lambda > 0.0 && roles.has_value()) {
                InitialValue scaled(2);
                scaled[0] = std::pow(lambda, roles->decay_of(0)) * alpha[0];
                scaled[1] = std::pow(lambda, roles->decay_of(1)) * alpha[1];
                const Shot s2 = integrate_shot(spec, scaled, opts);
                if (s2.outcome.tag == OutcomeTag::Crossed)
                    row.collapse_residual =
                        std::fabs(lambda * s2.outcome.r_event - row.r0) / row.r0;
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace hlslab
