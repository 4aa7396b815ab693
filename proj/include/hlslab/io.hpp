#pragma once

// File formats: profile CSV (r,u1,du1,...,uL,duL at 17 significant digits),
// report JSON, run manifests with a canonical config digest, atomic writes.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hlslab/assumptions.hpp"
#include "hlslab/diagnostics.hpp"
#include "hlslab/integrate.hpp"
#include "hlslab/shooting.hpp"
#include "hlslab/system.hpp"

namespace hlslab {

using nlohmann::json;

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// write-temp-then-rename so partially written outputs never replace good ones
inline void atomic_write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

inline std::string profile_to_csv(const RadialProfile& prof) {
    std::ostringstream out;
    out << "r";
    for (int i = 0; i < prof.components(); ++i) out << ",u" << i + 1 << ",du" << i + 1;
    out << "\n";
    for (std::size_t k = 0; k < prof.size(); ++k) {
        out << fmt17(prof.r[k]);
        for (int i = 0; i < prof.components(); ++i)
            out << "," << fmt17(prof.u[i][k]) << "," << fmt17(prof.du[i][k]);
        out << "\n";
    }
    return out.str();
}

inline RadialProfile profile_from_csv(const std::string& content, int n) {
    RadialProfile prof;
    prof.n = n;
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("profile csv: empty file");
    int cols = 1;
    for (char c : line) cols += c == ',';
    if (cols < 3 || cols % 2 == 0)
        throw std::runtime_error("profile csv: expected header r,u1,du1,...");
    const int L = (cols - 1) / 2;
    prof.u.assign(L, {});
    prof.du.assign(L, {});
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
        if (int(vals.size()) != cols) throw std::runtime_error("profile csv: ragged row");
        prof.r.push_back(vals[0]);
        for (int i = 0; i < L; ++i) {
            prof.u[i].push_back(vals[1 + 2 * i]);
            prof.du[i].push_back(vals[2 + 2 * i]);
        }
    }
    if (prof.r.empty()) throw std::runtime_error("profile csv: no rows");
    return prof;
}

inline RadialProfile profile_from_csv_file(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open profile: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return profile_from_csv(ss.str(), n);
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string digest_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---- JSON conversions -----------------------------------------------------

inline json to_json(const ShotOutcome& oc) {
    json j;
    j["tag"] = to_string(oc.tag);
    if (oc.tag == OutcomeTag::Crossed) {
        j["component"] = oc.component;
        j["r0"] = oc.r_event;
    } else {
        j["r_end"] = oc.r_event;
    }
    j["terminal_u"] = oc.terminal_u;
    j["terminal_du"] = oc.terminal_du;
    return j;
}

inline json to_json(const ShotStats& st) {
    return json{{"accepted_steps", st.accepted},
                {"rejected_steps", st.rejected},
                {"rhs_evals", st.rhs_evals},
                {"crossing_tie", st.crossing_tie}};
}

inline json to_json(const GroundStateResult& res) {
    json j;
    j["status"] = to_string(res.status);
    j["a"] = res.a;
    j["alpha_star"] = res.alpha_star;
    j["t_star"] = res.t_star;
    j["bracket_width"] = res.bracket_width;
    j["bracket"] = {res.bracket_lo, res.bracket_hi};
    j["outcome"] = to_json(res.shot.outcome);
    j["labels"] = {{"lo", res.label_lo}, {"hi", res.label_hi}};
    j["label_evaluations"] = res.probes.size();
    return j;
}

inline json to_json(const ScanTable& table) {
    json rows = json::array();
    for (const auto& row : table.rows) {
        json r;
        r["alpha"] = row.alpha;
        r["outcome"] = to_string(row.outcome);
        r["component"] = row.component;
        r["r0"] = std::isfinite(row.r0) ? json(row.r0) : json();  // null = infinity marker
        if (std::isfinite(row.collapse_residual)) r["collapse_residual"] = row.collapse_residual;
        rows.push_back(std::move(r));
    }
    json j;
    j["r0_table"] = std::move(rows);
    if (table.lambda > 0.0) j["lambda"] = table.lambda;
    return j;
}

inline std::string scan_to_csv(const ScanTable& table) {
    std::ostringstream out;
    const int L = table.rows.empty() ? 0 : int(table.rows[0].alpha.size());
    for (int i = 0; i < L; ++i) out << "alpha" << i + 1 << ",";
    out << "outcome,component,r0,collapse_residual\n";
    for (const auto& row : table.rows) {
        for (double a : row.alpha) out << fmt17(a) << ",";
        out << to_string(row.outcome) << "," << row.component << ","
            << (std::isfinite(row.r0) ? fmt17(row.r0) : "inf") << ","
            << (std::isfinite(row.collapse_residual) ? fmt17(row.collapse_residual) : "")
            << "\n";
    }
    return out.str();
}

inline json to_json(const SlopeReport& rep) {
    json j;
    j["window"] = {rep.r_lo, rep.r_hi};
    j["slope"] = rep.slope;
    j["fit_residual"] = rep.fit_residual;
    j["nodes_used"] = rep.nodes_used;
    json pred = json::array();
    for (double p : rep.predicted) pred.push_back(std::isnan(p) ? json() : json(p));
    j["predicted"] = std::move(pred);
    return j;
}

inline json to_json(const EnergyReport& rep) {
    json tracks = json::array();
    for (const auto& t : rep.tracks) {
        json tj;
        tj["name"] = t.name;
        tj["component"] = t.component;
        tj["power"] = t.power;
        tj["fitted_exponent"] = t.fitted_exponent;
        tj["fit_residual"] = t.fit_residual;
        tj["bound"] = std::isnan(t.bound) ? json() : json(t.bound);
        tj["pass"] = t.pass;
        tracks.push_back(std::move(tj));
    }
    return json{{"window", {rep.r_lo, rep.r_hi}}, {"tracks", std::move(tracks)}};
}

inline json to_json(const AssumptionReport& rep) {
    json faces = json::array();
    for (const auto& f : rep.faces) {
        faces.push_back(json{{"zero_set", f.zero_set},
                             {"base_point", f.base_point},
                             {"deltas", f.deltas},
                             {"max_ratio", f.max_ratio},
                             {"ratio_infinite", f.ratio_infinite},
                             {"bounded", f.bounded}});
    }
    return json{{"sum_nonneg_ok", rep.sum_nonneg_ok},
                {"min_sum", rep.min_sum},
                {"faces", std::move(faces)},
                {"warnings", rep.warnings}};
}

}  // namespace hlslab
