#pragma once

// Command-line front end: config ingestion, experiment orchestration,
// parallel sweeps, profile/report persistence, run manifests. All commands
// write reports as JSON (stdout and file), profiles as CSV, and a manifest
// per run; writes are atomic. Exit codes: 0 success, 1 runtime failure,
// 2 invalid or not-applicable input.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hlslab/assumptions.hpp"
#include "hlslab/config.hpp"
#include "hlslab/diagnostics.hpp"
#include "hlslab/io.hpp"
#include "hlslab/shooting.hpp"
#include "hlslab/system.hpp"
#include "hlslab/version.hpp"

namespace hlslab::cli {

struct GlobalOpts {
    std::string config_path;
    std::string out_dir;
    std::string tag;
    std::uint64_t seed = 0;
    int jobs = 1;
    double rmax_override = 0.0;
    double rtol_override = 0.0;
};

namespace detail {

inline std::string default_out_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("HLS_LAB_OUT"); env && *env) return env;
    return ".";
}

inline SystemConfig load_config(const GlobalOpts& g, bool required = true) {
    if (g.config_path.empty()) {
        if (required) throw config_error("--config is required for this command");
        return SystemConfig{};
    }
    SystemConfig cfg = parse_config(g.config_path);
    if (g.rmax_override > 0.0) cfg.shot.r_max = g.rmax_override;
    if (g.rtol_override > 0.0) cfg.shot.rtol = g.rtol_override;
    cfg.search.shot = cfg.shot;
    return cfg;
}

struct RunWriter {
    std::string dir;
    std::string tag;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    std::string path(const std::string& suffix) const {
        return (std::filesystem::path(dir) / (tag + "_" + suffix)).string();
    }
    void write(const std::string& suffix, const std::string& content) {
        const std::string p = path(suffix);
        atomic_write_file(p, content);
        outputs.push_back(p);
    }
    void manifest(const SystemConfig& cfg, const std::vector<std::string>& argv,
                  std::uint64_t seed) {
        json m;
        m["config_digest"] = digest_hex(fnv1a64(cfg.canonical()));
        m["tool_version"] = kVersion;
        std::string cmd;
        for (const auto& a : argv) cmd += (cmd.empty() ? "" : " ") + a;
        m["command"] = cmd;
        m["wall_ms"] = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
        m["seed"] = seed;
        m["outputs"] = outputs;
        atomic_write_file(path("manifest.json"), m.dump(2) + "\n");
    }
};

inline std::vector<double> parse_alpha(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw config_error("--alpha: cannot parse '" + cell + "'");
        }
    }
    if (out.empty()) throw config_error("--alpha: empty list");
    return out;
}

struct Range {
    double lo = 0.0, hi = 0.0;
    int count = 0;
};

inline Range parse_range(const std::string& text) {
    Range r;
    char c1, c2;
    std::istringstream in(text);
    if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.count) || c1 != ':' || c2 != ':' || r.count < 1)
        throw config_error("range '" + text + "' must be lo:hi:count");
    return r;
}

inline double range_at(const Range& r, int i) {
    return r.count == 1 ? r.lo : r.lo + (r.hi - r.lo) * double(i) / double(r.count - 1);
}

// diagnostics report over a profile; sections that do not apply to the
// profile (too-short windows, non-pair systems) degrade to nulls with notes
inline json diagnostics_report(const SystemSpec& spec, const SystemConfig& cfg,
                               const RadialProfile& prof,
                               const std::vector<double>& checkpoints_opt) {
    json rep;
    const auto pair = detect_pair_roles(spec);

    try {
        auto slopes = fit_decay_slopes(prof);
        if (auto pred = predicted_decay_slopes(spec)) slopes.predicted = *pred;
        rep["slopes"] = to_json(slopes);
    } catch (const std::exception& e) {
        rep["slopes"] = json{{"error", e.what()}};
    }

    rep["comparison_max_violation"] = json();
    if (pair) {
        try {
            PairRoles roles = *pair;
            bool swapped = false;
            if (roles.p < roles.q) {
                std::swap(roles.p, roles.q);
                std::swap(roles.alpha_index, roles.beta_index);
                swapped = true;
            }
            const auto cr = check_comparison(prof, roles);
            rep["comparison_max_violation"] = cr.max_violation;
            rep["comparison"] = json{{"max_violation", cr.max_violation},
                                     {"max_violation_rel", cr.max_violation_rel},
                                     {"scale", cr.scale},
                                     {"r_at_max", cr.r_at_max},
                                     {"roles_swapped", swapped},
                                     {"pass", cr.max_violation <= 1e-8 * cr.scale}};
        } catch (const std::exception& e) {
            rep["comparison"] = json{{"error", e.what()}};
        }
    }

    try {
        rep["energy_exponents"] = to_json(energy_growth(prof, spec));
    } catch (const std::exception& e) {
        rep["energy_exponents"] = json{{"error", e.what()}};
    }

    if (pair) {
        try {
            std::vector<double> cps = checkpoints_opt;
            if (cps.empty()) {
                const double r_end = prof.r.back();
                cps = {0.25 * r_end, 0.5 * r_end, 0.85 * r_end};
            }
            const double n = spec.n;
            json pz;
            pz["checkpoints"] = cps;
            json per_a1 = json::array();
            for (double a1 : {0.0, n / (pair->p + 1.0), n - 2.0}) {
                const auto res = pohozaev_residual(spec, prof, *pair, a1, cps);
                per_a1.push_back(json{{"a1", a1}, {"residuals", res}});
            }
            pz["by_a1"] = std::move(per_a1);
            rep["pohozaev"] = std::move(pz);
        } catch (const std::exception& e) {
            rep["pohozaev"] = json{{"error", e.what()}};
        }
    } else {
        rep["pohozaev"] = json();
    }

    const auto db = derivative_bound_margin(prof);
    rep["derivative_bound_margin"] = db.max_margin;
    rep["derivative_bound"] = json{{"max_margin", db.max_margin},
                                   {"max_margin_rel", db.max_margin_rel},
                                   {"r_at_max", db.r_at_max}};
    (void)cfg;
    return rep;
}

}  // namespace detail

inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"radial shooting laboratory for semilinear elliptic systems"};
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--config", g.config_path, "TOML run configuration");
    app.add_option("--out", g.out_dir, "output directory (default $HLS_LAB_OUT or .)");
    app.add_option("--tag", g.tag, "output file prefix (default: command name)");
    app.add_option("--seed", g.seed, "seed for all sampled randomness");
    app.add_option("--jobs", g.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_option("--rmax", g.rmax_override, "override shot r_max");
    app.add_option("--rtol", g.rtol_override, "override shot rtol");

    // classify
    auto* c_classify = app.add_subcommand("classify", "regime of (n, p, q, k)");
    double cl_n = 0, cl_p = 0, cl_q = 0;
    int cl_k = 1;
    c_classify->add_option("--n", cl_n)->required();
    c_classify->add_option("--p", cl_p)->required();
    c_classify->add_option("--q", cl_q)->required();
    c_classify->add_option("--k", cl_k);

    // shoot
    auto* c_shoot = app.add_subcommand("shoot", "integrate one radial shot");
    std::string shoot_alpha;
    c_shoot->add_option("--alpha", shoot_alpha, "initial values a1,a2,...")->required();

    // ground-state
    auto* c_ground = app.add_subcommand("ground-state", "separating initial value search");
    double gs_a = 0.0;
    c_ground->add_option("--a", gs_a, "simplex level sum(alpha) = a");

    // dirichlet-scan
    auto* c_scan = app.add_subcommand("dirichlet-scan", "first-zero radii over the simplex");
    int scan_grid = 100;
    double scan_a = 1.0, scan_lambda = 2.0;
    c_scan->add_option("--grid", scan_grid)->check(CLI::PositiveNumber);
    c_scan->add_option("--a", scan_a);
    c_scan->add_option("--lambda", scan_lambda, "scaling-collapse factor (0 disables)");

    // sweep
    auto* c_sweep = app.add_subcommand("sweep", "outcome table over a parameter grid");
    int sweep_tgrid = 0;
    double sweep_a = 1.0, sweep_jitter = 0.0;
    std::string sweep_prange, sweep_qrange;
    c_sweep->add_option("--t-grid", sweep_tgrid, "alpha sweep: points on the simplex");
    c_sweep->add_option("--a", sweep_a);
    c_sweep->add_option("--jitter", sweep_jitter, "seeded relative jitter of grid points");
    c_sweep->add_option("--p-range", sweep_prange, "regime sweep: lo:hi:count");
    c_sweep->add_option("--q-range", sweep_qrange, "regime sweep: lo:hi:count");

    // verify
    auto* c_verify = app.add_subcommand("verify", "diagnostics report for a stored profile");
    std::string verify_profile, verify_checkpoints;
    c_verify->add_option("--profile", verify_profile)->required();
    c_verify->add_option("--checkpoints", verify_checkpoints, "R1,R2,... for the identity check");

    // asymptotics
    auto* c_asym = app.add_subcommand("asymptotics", "decay slopes and fitted limits");
    std::string asym_profile, asym_alpha;
    double asym_s = 0.0;
    c_asym->add_option("--profile", asym_profile, "analyze a stored profile");
    c_asym->add_option("--alpha", asym_alpha, "or shoot from these initial values");
    c_asym->add_option("--s", asym_s, "report the n - s*beta exponent probe for this s");

    // check-assumptions
    auto* c_assume = app.add_subcommand("check-assumptions", "sampled structural assumption probe");
    int assume_samples = 200;
    c_assume->add_option("--samples", assume_samples)->check(CLI::PositiveNumber);

    app.require_subcommand(1);

    try {
        app.parse(std::vector<std::string>(argv.rbegin(), argv.rend()));
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help();
            return 0;
        }
        err << json{{"error", e.what()}, {"type", "usage"}}.dump() << "\n";
        return 2;
    }

    try {
        detail::RunWriter w;
        w.dir = detail::default_out_dir(g.out_dir);

        if (c_classify->parsed()) {
            const Regime reg = classify(int(cl_n), PowerPair(cl_p, cl_q), cl_k);
            json j;
            j["regime"] = to_string(reg.tag);
            j["n"] = int(cl_n);
            j["p"] = cl_p;
            j["q"] = cl_q;
            j["k"] = cl_k;
            j["detail"] = reg.detail;
            if (reg.tag != RegimeTag::NotApplicable) {
                const auto e = make_exponents(PowerPair(cl_p, cl_q));
                j["alpha"] = e.alpha;
                j["beta"] = e.beta;
                j["hyperbola_lhs"] = reg.hyperbola_lhs;
                j["hyperbola_rhs"] = reg.hyperbola_rhs;
                j["alpha_plus_beta"] = reg.alpha_plus_beta;
            }
            out << j.dump() << "\n";
            return reg.tag == RegimeTag::NotApplicable ? 2 : 0;
        }

        SystemConfig cfg = detail::load_config(g);
        const SystemSpec spec = cfg.build_system();
        // effective config with defaults applied, echoed into every report
        json cfg_echo = json::object();
        {
            std::istringstream canon(cfg.canonical());
            std::string line;
            while (std::getline(canon, line)) {
                const auto eq = line.find('=');
                if (eq != std::string::npos) cfg_echo[line.substr(0, eq)] = line.substr(eq + 1);
            }
        }

        if (c_shoot->parsed()) {
            w.tag = g.tag.empty() ? "shoot" : g.tag;
            const auto alpha = detail::parse_alpha(shoot_alpha);
            const Shot shot = integrate_shot(spec, alpha, cfg.shot);
            json rep;
            rep["alpha"] = alpha;
            rep["outcome"] = to_json(shot.outcome);
            rep["stats"] = to_json(shot.stats);
            rep["flux_residual"] = flux_residual(spec, shot);
            rep["config"] = cfg_echo;
            w.write("profile.csv", profile_to_csv(shot.profile));
            w.write("report.json", rep.dump(2) + "\n");
            w.manifest(cfg, argv, g.seed);
            out << rep.dump() << "\n";
            return 0;
        }

        if (c_ground->parsed()) {
            w.tag = g.tag.empty() ? "ground_state" : g.tag;
            SearchOptions so = cfg.search;
            if (gs_a > 0.0) so.a = gs_a;
            const auto res = simplex_search(spec, so);
            json rep = to_json(res);
            rep["config"] = cfg_echo;
            w.write("profile.csv", profile_to_csv(res.shot.profile));
            w.write("report.json", rep.dump(2) + "\n");
            w.manifest(cfg, argv, g.seed);
            out << rep.dump() << "\n";
            if (res.status == SearchStatus::NoSeparation)
                err << json{{"error", "no label change found on the simplex"},
                            {"type", "no-separation"}}
                           .dump()
                    << "\n";
            return 0;
        }

        if (c_scan->parsed()) {
            w.tag = g.tag.empty() ? "dirichlet_scan" : g.tag;
            if (spec.L != 2)
                throw config_error("dirichlet-scan: two-component system required");
            std::vector<InitialValue> alphas;
            for (int i = 1; i <= scan_grid; ++i) {
                const double t = double(i) / double(scan_grid + 1);
                alphas.push_back({t * scan_a, (1.0 - t) * scan_a});
            }
            const auto table = dirichlet_scan(spec, alphas, cfg.shot, scan_lambda);
            json rep = to_json(table);
            rep["config"] = cfg_echo;
            w.write("table.csv", scan_to_csv(table));
            w.write("report.json", rep.dump(2) + "\n");
            w.manifest(cfg, argv, g.seed);
            out << rep.dump() << "\n";
            return 0;
        }

        if (c_sweep->parsed()) {
            w.tag = g.tag.empty() ? "sweep" : g.tag;
            std::ostringstream csv;
            if (sweep_tgrid > 0) {
                // one shot per row, worker pool, deterministic by index
                struct Row {
                    double t = 0;
                    InitialValue alpha;
                    std::string outcome;
                    int component = -1;
                    double r0 = std::numeric_limits<double>::infinity();
                    std::string error;
                };
                if (spec.L != 2) throw config_error("sweep --t-grid: two-component system required");
                std::vector<Row> rows(sweep_tgrid);
                std::atomic<int> next{0};
                auto worker = [&]() {
                    while (true) {
                        const int i = next.fetch_add(1);
                        if (i >= sweep_tgrid) break;
                        Row& row = rows[i];
                        double t = double(i + 1) / double(sweep_tgrid + 1);
                        if (sweep_jitter > 0.0) {
                            std::mt19937_64 rng(g.seed * 1000003ull + std::uint64_t(i));
                            std::uniform_real_distribution<double> u(-0.5, 0.5);
                            t += sweep_jitter * u(rng) / double(sweep_tgrid + 1);
                        }
                        row.t = t;
                        row.alpha = {t * sweep_a, (1.0 - t) * sweep_a};
                        try {
                            const Shot s = integrate_shot(spec, row.alpha, cfg.shot);
                            row.outcome = to_string(s.outcome.tag);
                            if (s.outcome.tag == OutcomeTag::Crossed) {
                                row.component = s.outcome.component;
                                row.r0 = s.outcome.r_event;
                            }
                        } catch (const std::exception& e) {
                            row.outcome = "error";
                            row.error = e.what();
                        }
                    }
                };
                std::vector<std::thread> pool;
                const int nw = std::max(1, std::min(g.jobs, sweep_tgrid));
                for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
                for (auto& th : pool) th.join();
                csv << "index,t,alpha1,alpha2,outcome,component,r0,error\n";
                for (int i = 0; i < sweep_tgrid; ++i) {
                    const auto& row = rows[i];
                    csv << i << "," << fmt17(row.t) << "," << fmt17(row.alpha[0]) << ","
                        << fmt17(row.alpha[1]) << "," << row.outcome << "," << row.component
                        << "," << (std::isfinite(row.r0) ? fmt17(row.r0) : "inf") << ","
                        << row.error << "\n";
                }
            } else if (!sweep_prange.empty() && !sweep_qrange.empty()) {
                const auto pr = detail::parse_range(sweep_prange);
                const auto qr = detail::parse_range(sweep_qrange);
                csv << "index,p,q,regime,alpha,beta\n";
                int idx = 0;
                for (int i = 0; i < pr.count; ++i)
                    for (int j = 0; j < qr.count; ++j, ++idx) {
                        const double p = detail::range_at(pr, i), q = detail::range_at(qr, j);
                        const Regime reg = classify(spec.n, PowerPair(p, q), cfg.k);
                        csv << idx << "," << fmt17(p) << "," << fmt17(q) << ","
                            << to_string(reg.tag);
                        if (p * q > 1.0) {
                            const auto e = make_exponents(PowerPair(p, q));
                            csv << "," << fmt17(e.alpha) << "," << fmt17(e.beta);
                        } else {
                            csv << ",,";
                        }
                        csv << "\n";
                    }
            } else {
                throw config_error("sweep needs --t-grid N or both --p-range and --q-range");
            }
            w.write("table.csv", csv.str());
            w.manifest(cfg, argv, g.seed);
            out << json{{"rows_written", true}, {"table", w.outputs.front()}}.dump() << "\n";
            return 0;
        }

        if (c_verify->parsed()) {
            w.tag = g.tag.empty() ? "verify" : g.tag;
            const auto prof = profile_from_csv_file(verify_profile, spec.n);
            std::vector<double> cps;
            if (!verify_checkpoints.empty()) cps = detail::parse_alpha(verify_checkpoints);
            json rep = detail::diagnostics_report(spec, cfg, prof, cps);
            rep["config"] = cfg_echo;
            rep["profile"] = verify_profile;
            w.write("report.json", rep.dump(2) + "\n");
            w.manifest(cfg, argv, g.seed);
            out << rep.dump() << "\n";
            return 0;
        }

        if (c_asym->parsed()) {
            w.tag = g.tag.empty() ? "asymptotics" : g.tag;
            RadialProfile prof;
            if (!asym_profile.empty()) {
                prof = profile_from_csv_file(asym_profile, spec.n);
            } else if (!asym_alpha.empty()) {
                prof = integrate_shot(spec, detail::parse_alpha(asym_alpha), cfg.shot).profile;
            } else {
                prof = simplex_search(spec, cfg.search).shot.profile;
            }
            json rep;
            auto slopes = fit_decay_slopes(prof);
            if (auto pred = predicted_decay_slopes(spec)) slopes.predicted = *pred;
            rep["slopes"] = to_json(slopes);

            // fitted limit of u_i(r) r^{-predicted slope} over the two window
            // halves; drift between the halves is the convergence indicator
            if (auto pred = predicted_decay_slopes(spec)) {
                json limits = json::array();
                const double mid = std::sqrt(slopes.r_lo * slopes.r_hi);
                for (int i = 0; i < prof.components(); ++i) {
                    auto limit_over = [&](double lo, double hi) {
                        double sum = 0.0;
                        int cnt = 0;
                        for (std::size_t kn = 0; kn < prof.size(); ++kn) {
                            const double r = prof.r[kn];
                            if (r < lo || r > hi || !(prof.u[i][kn] > 0.0)) continue;
                            sum += prof.u[i][kn] * std::pow(r, -(*pred)[i]);
                            ++cnt;
                        }
                        return cnt ? sum / cnt : std::numeric_limits<double>::quiet_NaN();
                    };
                    limits.push_back(json{{"component", i},
                                          {"rate", -(*pred)[i]},
                                          {"limit_inner", limit_over(slopes.r_lo, mid)},
                                          {"limit_outer", limit_over(mid, slopes.r_hi)}});
                }
                rep["fitted_limits"] = std::move(limits);
            }

            if (asym_s > 0.0) {
                if (const auto pair = detect_pair_roles(spec)) {
                    const auto tr = energy_power_probe(prof, pair->beta_index, asym_s);
                    rep["s_probe"] = json{{"s", asym_s},
                                          {"fitted_exponent", tr.fitted_exponent},
                                          {"reference_exponent", spec.n - asym_s * pair->exps.beta}};
                }
            }
            rep["config"] = cfg_echo;
            w.write("report.json", rep.dump(2) + "\n");
            w.manifest(cfg, argv, g.seed);
            out << rep.dump() << "\n";
            return 0;
        }

        if (c_assume->parsed()) {
            w.tag = g.tag.empty() ? "assumptions" : g.tag;
            const auto rep0 = check_assumptions(spec, assume_samples, g.seed);
            json rep = to_json(rep0);
            rep["config"] = cfg_echo;
            w.write("report.json", rep.dump(2) + "\n");
            w.manifest(cfg, argv, g.seed);
            out << rep.dump() << "\n";
            return 0;
        }

        throw std::logic_error("no subcommand dispatched");
    } catch (const not_applicable& e) {
        err << json{{"error", e.what()}, {"type", "not-applicable"}}.dump() << "\n";
        return 2;
    } catch (const config_error& e) {
        err << json{{"error", e.what()}, {"type", "config"}}.dump() << "\n";
        return 2;
    } catch (const toml_error& e) {
        err << json{{"error", e.what()}, {"type", "config-syntax"}}.dump() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << json{{"error", e.what()}, {"type", "invalid"}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << json{{"error", e.what()}, {"type", "runtime"}}.dump() << "\n";
        return 1;
    }
}

}  // namespace hlslab::cli
