#pragma once

// Sampled probe of the structural assumptions on f: nonnegativity of
// sum_i f_i on the closed cone, and the boundary control inequality
// sum_{positive coords} |f_i| <= C(alpha) * sum_{zero coords} f_i near each
// face point. A probe, not a proof: it reports evidence and warnings.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hlslab/system.hpp"

namespace hlslab {

struct FaceProbe {
    std::vector<int> zero_set;       // components pinned to 0 at the base point
    std::vector<double> base_point;
    std::vector<double> deltas;      // shrinking neighborhood scales
    std::vector<double> max_ratio;   // observed sup ratio per scale
    bool ratio_infinite = false;     // zero-face source vanished while numerator > 0
    bool bounded = true;             // heuristic verdict
};

struct AssumptionReport {
    bool sum_nonneg_ok = true;
    double min_sum = 0.0;
    std::vector<FaceProbe> faces;
    std::vector<std::string> warnings;
};

inline AssumptionReport check_assumptions(const SystemSpec& spec, int sample_count,
                                          std::uint64_t seed) {
    spec.validate();
    if (sample_count < 1) throw std::invalid_argument("check_assumptions: sample_count >= 1");
    const int L = spec.L;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    AssumptionReport rep;
    rep.min_sum = std::numeric_limits<double>::infinity();

    std::vector<double> pt(L);
    for (int s = 0; s < sample_count; ++s) {
        for (int i = 0; i < L; ++i) {
            const double x = 3.0 * u01(rng);
            pt[i] = (u01(rng) < 0.15) ? 0.0 : x;  // mix boundary into the sample
        }
        const auto f = eval_rhs(spec, pt);
        double sum = 0.0;
        for (double v : f) sum += v;
        rep.min_sum = std::min(rep.min_sum, sum);
    }
    rep.sum_nonneg_ok = rep.min_sum >= 0.0;
    if (!rep.sum_nonneg_ok) rep.warnings.push_back("sum_i f_i < 0 observed on the closed cone");

    // Proper faces: at least one zero and one positive coordinate.
    std::vector<std::vector<int>> faces;
    if (L >= 2) {
        if (L <= 8) {
            for (unsigned mask = 1; mask + 1 < (1u << L); ++mask) {
                std::vector<int> z;
                for (int i = 0; i < L; ++i)
                    if (mask & (1u << i)) z.push_back(i);
                if (!z.empty() && z.size() < std::size_t(L)) faces.push_back(z);
            }
        } else {
            for (int t = 0; t < 24; ++t) {
                std::vector<int> z;
                for (int i = 0; i < L; ++i)
                    if (u01(rng) < 0.4) z.push_back(i);
                if (!z.empty() && z.size() < std::size_t(L)) faces.push_back(z);
            }
        }
    }

    const int levels = 6;
    const int per_level = std::max(8, sample_count / 8);
    std::vector<double> beta(L);
    for (const auto& zset : faces) {
        FaceProbe probe;
        probe.zero_set = zset;
        probe.base_point.assign(L, 0.0);
        std::vector<bool> on_face(L, false);
        for (int i : zset) on_face[i] = true;
        for (int i = 0; i < L; ++i)
            if (!on_face[i]) probe.base_point[i] = 0.5 + 1.5 * u01(rng);

        double delta = 0.5;
        for (int lev = 0; lev < levels; ++lev, delta *= 0.25) {
            double worst = 0.0;
            for (int s = 0; s < per_level; ++s) {
                for (int i = 0; i < L; ++i) {
                    if (on_face[i]) beta[i] = delta * u01(rng);
                    else beta[i] = std::max(1e-12, probe.base_point[i] + delta * (u01(rng) - 0.5));
                }
                const auto f = eval_rhs(spec, beta);
                double num = 0.0, den = 0.0;
                for (int i = 0; i < L; ++i) {
                    if (on_face[i]) den += f[i];
                    else num += std::fabs(f[i]);
                }
                if (den <= 0.0) {
                    if (num > 0.0) probe.ratio_infinite = true;
                    continue;
                }
                worst = std::max(worst, num / den);
            }
            probe.deltas.push_back(delta);
            probe.max_ratio.push_back(worst);
        }
        const double first = probe.max_ratio.front();
        const double last = probe.max_ratio.back();
        probe.bounded = !probe.ratio_infinite && last <= std::max(10.0 * first, first + 1.0);
        if (!probe.bounded) {
            std::string fs;
            for (int i : zset) fs += (fs.empty() ? "" : ",") + std::to_string(i);
            rep.warnings.push_back("boundary control ratio looks unbounded near face {" + fs +
                                   "}");
        }
        rep.faces.push_back(std::move(probe));
    }
    return rep;
}

}  // namespace hlslab
