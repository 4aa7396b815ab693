#pragma once

// Run configuration: a TOML file describing the system (kind + parameters or
// explicit monomial tables), shot options, and search options. Unknown keys
// are rejected; defaults are applied and echoed into the canonical form that
// feeds the manifest digest.

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hlslab/integrate.hpp"
#include "hlslab/minitoml.hpp"
#include "hlslab/shooting.hpp"
#include "hlslab/system.hpp"

namespace hlslab {

class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct SystemConfig {
    std::string kind = "lane-emden";  // lane-emden | scalar | cascade | decoupled | custom
    int n = 3;
    int k = 1;
    double p = 0.0;
    double q = 0.0;
    std::string label;
    std::vector<std::string> rhs_terms;  // custom kind: one monomial-sum string per component
    ShotOptions shot;
    SearchOptions search;

    SystemSpec build_system() const {
        if (kind == "lane-emden") return lane_emden(n, PowerPair(p, q));
        if (kind == "scalar") return scalar_power(n, p);
        if (kind == "decoupled") return decoupled_pair(n, PowerPair(p, q));
        if (kind == "cascade") return polyharmonic_cascade(n, k, PowerPair(p, q));
        if (kind == "custom") {
            SystemSpec spec;
            spec.n = n;
            spec.L = int(rhs_terms.size());
            for (const auto& s : rhs_terms) spec.rhs.push_back(parse_monomial_sum(s, spec.L));
            spec.label = label.empty() ? "custom" : label;
            spec.validate();
            return spec;
        }
        throw config_error("unknown kind '" + kind + "'");
    }

    // requires pq > 1 (or p > 1 for scalar); commands relying on exponents
    // call this and surface not_applicable as exit code 2
    ExponentPair require_exponents() const {
        if (kind == "scalar") {
            if (!(p * p > 1.0))
                throw not_applicable("config: scalar kind requires p > 1 (hypothesis pq>1)");
            return make_exponents(PowerPair(p, p));
        }
        if (!(p * q > 1.0))
            throw not_applicable("config: p = " + std::to_string(p) + ", q = " +
                                 std::to_string(q) + " violates the hypothesis pq>1");
        return make_exponents(PowerPair(p, q));
    }

    // canonical key=value dump, sorted, defaults applied; digest input
    std::string canonical() const;

    static std::vector<Monomial> parse_monomial_sum(const std::string& text, int L);
};

inline std::vector<Monomial> SystemConfig::parse_monomial_sum(const std::string& text, int L) {
    // grammar: sum := term ('+' term)*, term := factor ('*' factor)*,
    // factor := number | 'u'INDEX('^'number)?
    std::vector<Monomial> out;
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto number = [&]() {
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(text.substr(i), &used);
        } catch (const std::exception&) {
            throw config_error("rhs: expected a number at '" + text.substr(i) + "'");
        }
        i += used;
        return v;
    };
    while (true) {
        skip();
        double coeff = 1.0;
        std::vector<double> exps(L, 0.0);
        bool saw_factor = false;
        while (true) {
            skip();
            if (i < text.size() && (text[i] == 'u' || text[i] == 'U')) {
                ++i;
                if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
                    throw config_error("rhs: component index expected after 'u'");
                int idx = 0;
                while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
                    idx = idx * 10 + (text[i++] - '0');
                if (idx < 1 || idx > L)
                    throw config_error("rhs: component u" + std::to_string(idx) +
                                       " out of range 1.." + std::to_string(L));
                double e = 1.0;
                if (i < text.size() && text[i] == '^') {
                    ++i;
                    e = number();
                }
                exps[idx - 1] += e;
                saw_factor = true;
            } else if (i < text.size() &&
                       (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) {
                coeff *= number();
                saw_factor = true;
            } else {
                break;
            }
            skip();
            if (i < text.size() && text[i] == '*') {
                ++i;
                continue;
            }
            break;
        }
        if (!saw_factor) throw config_error("rhs: empty term in '" + text + "'");
        out.emplace_back(coeff, exps);
        skip();
        if (i < text.size() && text[i] == '+') {
            ++i;
            continue;
        }
        if (i < text.size())
            throw config_error("rhs: unexpected character '" + std::string(1, text[i]) + "'");
        break;
    }
    return out;
}

inline std::string SystemConfig::canonical() const {
    std::ostringstream out;
    char buf[40];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "k=" << k << "\n"
        << "kind=" << kind << "\n"
        << "label=" << label << "\n"
        << "n=" << n << "\n"
        << "p=" << num(p) << "\n"
        << "q=" << num(q) << "\n";
    for (std::size_t i = 0; i < rhs_terms.size(); ++i)
        out << "rhs" << i + 1 << "=" << rhs_terms[i] << "\n";
    out << "search.a=" << num(search.a) << "\n"
        << "search.label_rmax=" << num(search.label_rmax) << "\n"
        << "search.t_edge=" << num(search.t_edge) << "\n"
        << "search.t_tol=" << num(search.t_tol) << "\n";
    out << "shot.atol=" << num(shot.atol) << "\n"
        << "shot.blowup_bound=" << num(shot.blowup_bound) << "\n"
        << "shot.eps_decay=" << num(shot.eps_decay) << "\n"
        << "shot.h0=" << num(shot.h0) << "\n"
        << "shot.rmax=" << num(shot.r_max) << "\n"
        << "shot.rtol=" << num(shot.rtol) << "\n"
        << "shot.store_dr_rel=" << num(shot.store_dr_rel) << "\n"
        << "shot.store_stride=" << shot.store_stride << "\n";
    return out.str();
}

inline SystemConfig parse_config(const std::string& path) {
    const TomlDoc doc = toml_parse_file(path);

    static const std::set<std::string> known = {
        "kind", "n", "k", "p", "q", "label",
        "rhs1", "rhs2", "rhs3", "rhs4", "rhs5", "rhs6", "rhs7", "rhs8",
        "shot.rtol", "shot.atol", "shot.h0", "shot.rmax", "shot.eps_decay",
        "shot.blowup_bound", "shot.store_stride", "shot.store_dr_rel",
        "search.a", "search.t_tol", "search.t_edge", "search.label_rmax",
    };
    for (const auto& [key, value] : doc.values) {
        (void)value;
        if (!known.count(key)) throw config_error("unknown config key '" + key + "'");
    }

    SystemConfig cfg;
    auto num = [&](const std::string& key, double dflt) {
        if (!doc.has(key)) return dflt;
        try {
            return doc.at(key).as_number();
        } catch (const std::exception&) {
            throw config_error("key '" + key + "' must be a number");
        }
    };
    auto integer = [&](const std::string& key, int dflt) {
        if (!doc.has(key)) return dflt;
        const auto& v = doc.at(key);
        if (v.kind != TomlValue::Kind::Integer)
            throw config_error("key '" + key + "' must be an integer");
        return int(v.integer);
    };
    auto str = [&](const std::string& key, const std::string& dflt) {
        if (!doc.has(key)) return dflt;
        const auto& v = doc.at(key);
        if (v.kind != TomlValue::Kind::String)
            throw config_error("key '" + key + "' must be a string");
        return v.str;
    };

    cfg.kind = str("kind", "lane-emden");
    cfg.n = integer("n", 3);
    cfg.k = integer("k", 1);
    cfg.p = num("p", 0.0);
    cfg.q = num("q", 0.0);
    cfg.label = str("label", "");
    for (int i = 1; i <= 8; ++i) {
        const std::string key = "rhs" + std::to_string(i);
        if (doc.has(key)) {
            if (int(cfg.rhs_terms.size()) != i - 1)
                throw config_error("rhs components must be consecutive starting at rhs1");
            cfg.rhs_terms.push_back(str(key, ""));
        }
    }

    cfg.shot.rtol = num("shot.rtol", cfg.shot.rtol);
    cfg.shot.atol = num("shot.atol", cfg.shot.atol);
    cfg.shot.h0 = num("shot.h0", cfg.shot.h0);
    cfg.shot.r_max = num("shot.rmax", cfg.shot.r_max);
    cfg.shot.eps_decay = num("shot.eps_decay", cfg.shot.eps_decay);
    cfg.shot.blowup_bound = num("shot.blowup_bound", cfg.shot.blowup_bound);
    cfg.shot.store_stride = integer("shot.store_stride", cfg.shot.store_stride);
    cfg.shot.store_dr_rel = num("shot.store_dr_rel", cfg.shot.store_dr_rel);

    cfg.search.a = num("search.a", cfg.search.a);
    cfg.search.t_tol = num("search.t_tol", cfg.search.t_tol);
    cfg.search.t_edge = num("search.t_edge", cfg.search.t_edge);
    cfg.search.label_rmax = num("search.label_rmax", cfg.search.label_rmax);
    cfg.search.shot = cfg.shot;

    // semantic validation
    if (cfg.n < 3) throw config_error("key 'n': n >= 3 required");
    if (cfg.kind == "cascade" && cfg.n <= 2 * cfg.k)
        throw config_error("keys 'n','k': cascade requires n > 2k (got n = " +
                           std::to_string(cfg.n) + ", k = " + std::to_string(cfg.k) + ")");
    if (cfg.kind == "custom") {
        if (cfg.rhs_terms.empty())
            throw config_error("kind 'custom' requires rhs1.. monomial strings");
    } else if (cfg.kind == "scalar") {
        if (!(cfg.p > 0.0)) throw config_error("key 'p': scalar kind requires p > 0");
    } else {
        if (!(cfg.p > 0.0) || !(cfg.q > 0.0))
            throw config_error("keys 'p','q' must both be > 0 for kind '" + cfg.kind + "'");
    }
    try {
        cfg.shot.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("shot options: ") + e.what());
    }
    cfg.build_system();  // surfaces structural errors (arity, exponents) now
    return cfg;
}

}  // namespace hlslab
