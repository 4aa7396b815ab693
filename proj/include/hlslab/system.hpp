#pragma once

// Semilinear elliptic systems -Delta u_i = f_i(u) on R^n with positive
// monomial-sum right-hand sides, their scaling exponents, and the
// critical/supercritical/subcritical classification.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hlslab {

// Raised when a hypothesis of the theory is violated (pq <= 1, n <= 2k, ...).
// The CLI maps this to exit code 2.
class not_applicable : public std::domain_error {
public:
    explicit not_applicable(const std::string& what) : std::domain_error(what) {}
};

struct PowerPair {
    double p = 0.0;
    double q = 0.0;

    PowerPair() = default;
    PowerPair(double p_, double q_) : p(p_), q(q_) {
        if (!(p > 0.0) || !(q > 0.0) || !std::isfinite(p) || !std::isfinite(q))
            throw std::invalid_argument("PowerPair: p and q must be finite and > 0");
    }
    double pq() const { return p * q; }
};

// alpha = 2(p+1)/(pq-1), beta = 2(q+1)/(pq-1).
struct ExponentPair {
    double alpha = 0.0;
    double beta = 0.0;
};

inline ExponentPair make_exponents(const PowerPair& pq) {
    const double d = pq.p * pq.q - 1.0;
    if (!(d > 0.0))
        throw not_applicable("make_exponents: requires pq > 1 (got pq = " +
                             std::to_string(pq.pq()) + ")");
    return {2.0 * (pq.p + 1.0) / d, 2.0 * (pq.q + 1.0) / d};
}

enum class RegimeTag { Subcritical, Critical, Supercritical, NotApplicable };

inline const char* to_string(RegimeTag t) {
    switch (t) {
        case RegimeTag::Subcritical: return "subcritical";
        case RegimeTag::Critical: return "critical";
        case RegimeTag::Supercritical: return "supercritical";
        default: return "not-applicable";
    }
}

struct Regime {
    RegimeTag tag = RegimeTag::NotApplicable;
    std::string detail;
    // The two equivalent criteria, reported for k = 1 (they always agree in
    // sign; both are exposed so callers can check that).
    double hyperbola_lhs = 0.0;   // 1/(p+1) + 1/(q+1)
    double hyperbola_rhs = 0.0;   // (n - 2k)/n
    double alpha_plus_beta = 0.0; // vs n - 2 (k = 1 form)
};

// Classify (n, p, q, k) against the hyperbola 1/(p+1) + 1/(q+1) = (n-2k)/n.
// Equality uses a relative band of 1e-12 so exact rational inputs classify
// exactly and float inputs get a hairline.
inline Regime classify(int n, const PowerPair& pq, int k = 1) {
    if (n < 1 || k < 1) throw std::invalid_argument("classify: need n >= 1, k >= 1");
    Regime reg;
    if (!(pq.pq() > 1.0)) {
        reg.tag = RegimeTag::NotApplicable;
        reg.detail = "pq <= 1";
        return reg;
    }
    if (n <= 2 * k) {
        reg.tag = RegimeTag::NotApplicable;
        reg.detail = "n <= 2k";
        return reg;
    }
    const double lhs = 1.0 / (pq.p + 1.0) + 1.0 / (pq.q + 1.0);
    const double rhs = double(n - 2 * k) / double(n);
    reg.hyperbola_lhs = lhs;
    reg.hyperbola_rhs = rhs;
    const ExponentPair ab = make_exponents(pq);
    reg.alpha_plus_beta = ab.alpha + ab.beta;

    const double tol = 1e-12;
    const double diff = lhs - rhs;
    if (std::fabs(diff) <= tol * std::max(lhs, rhs)) {
        reg.tag = RegimeTag::Critical;
    } else if (diff < 0.0) {
        reg.tag = RegimeTag::Supercritical;
    } else {
        reg.tag = RegimeTag::Subcritical;
    }

    // Remark 2.1 form, meaningful for k = 1: alpha + beta vs n - 2. Same
    // numerator as the hyperbola criterion up to a positive factor, so the
    // two must agree; keep the cross-check anyway.
    if (k == 1) {
        const double d2 = reg.alpha_plus_beta - double(n - 2);
        RegimeTag t2;
        if (std::fabs(d2) <= tol * std::max(reg.alpha_plus_beta, double(n - 2)))
            t2 = RegimeTag::Critical;
        else
            t2 = d2 < 0.0 ? RegimeTag::Supercritical : RegimeTag::Subcritical;
        if (t2 != reg.tag)
            throw std::logic_error("classify: hyperbola and alpha+beta criteria disagree "
                                   "(hairline input straddles the tolerance band)");
    }
    reg.detail = std::string(to_string(reg.tag)) + ": 1/(p+1)+1/(q+1) = " + std::to_string(lhs) +
                 " vs (n-2k)/n = " + std::to_string(rhs);
    return reg;
}

// One term coeff * prod_j u_j^{e_j}, with 0^0 = 1. Coefficients are positive
// by construction, which makes sum_i f_i >= 0 on the closed cone automatic.
struct Monomial {
    double coeff = 1.0;
    std::vector<double> exponents;

    Monomial() = default;
    Monomial(double c, std::vector<double> e) : coeff(c), exponents(std::move(e)) {
        if (!(coeff > 0.0) || !std::isfinite(coeff))
            throw std::invalid_argument("Monomial: coefficient must be finite and > 0");
        for (double ex : exponents)
            if (!(ex >= 0.0) || !std::isfinite(ex))
                throw std::invalid_argument("Monomial: exponents must be finite and >= 0");
    }

    double eval(const std::vector<double>& u) const {
        double v = coeff;
        for (std::size_t j = 0; j < exponents.size(); ++j) {
            const double e = exponents[j];
            if (e == 0.0) continue;          // 0^0 = 1 by convention
            if (e == 1.0) v *= u[j];
            else if (e == 2.0) v *= u[j] * u[j];
            else v *= std::pow(u[j], e);
        }
        return v;
    }
};

struct SystemSpec {
    int n = 3;                                  // space dimension
    int L = 1;                                  // component count
    std::vector<std::vector<Monomial>> rhs;     // rhs[i] = monomials of f_i
    std::string label;

    void validate() const {
        if (n < 3) throw std::invalid_argument("SystemSpec: n >= 3 required");
        if (L < 1 || rhs.size() != std::size_t(L))
            throw std::invalid_argument("SystemSpec: rhs must have L entries");
        for (const auto& f : rhs)
            for (const auto& m : f)
                if (m.exponents.size() != std::size_t(L))
                    throw std::invalid_argument("SystemSpec: monomial arity != L");
    }
};

// f_1 = u_2^q, f_2 = u_1^p (the Lane-Emden pair as displayed in the source
// system; see lane_emden_roles for which component carries which decay rate).
inline SystemSpec lane_emden(int n, const PowerPair& pq) {
    if (n < 3) throw std::invalid_argument("lane_emden: n >= 3 required");
    SystemSpec s;
    s.n = n;
    s.L = 2;
    s.rhs = {{Monomial(1.0, {0.0, pq.q})}, {Monomial(1.0, {pq.p, 0.0})}};
    s.label = "lane-emden(n=" + std::to_string(n) + ",p=" + std::to_string(pq.p) +
              ",q=" + std::to_string(pq.q) + ")";
    return s;
}

// Scalar -Delta u = u^p.
inline SystemSpec scalar_power(int n, double p) {
    if (n < 3) throw std::invalid_argument("scalar_power: n >= 3 required");
    if (!(p > 0.0)) throw std::invalid_argument("scalar_power: p > 0 required");
    SystemSpec s;
    s.n = n;
    s.L = 1;
    s.rhs = {{Monomial(1.0, {p})}};
    s.label = "scalar(n=" + std::to_string(n) + ",p=" + std::to_string(p) + ")";
    return s;
}

// Decoupled pair f_1 = u_1^p, f_2 = u_2^q. Fails the boundary control
// assumption; kept as the standard counterexample probe target.
inline SystemSpec decoupled_pair(int n, const PowerPair& pq) {
    SystemSpec s;
    s.n = n;
    s.L = 2;
    s.rhs = {{Monomial(1.0, {pq.p, 0.0})}, {Monomial(1.0, {0.0, pq.q})}};
    s.label = "decoupled";
    return s;
}

// Cascade encoding of (-Delta)^k u = v^q, (-Delta)^k v = u^p as a 2k-component
// second-order system: components (u_1..u_k, v_1..v_k) with
//   -Delta u_j = u_{j+1} (j < k),  -Delta u_k = v_1^q,
//   -Delta v_j = v_{j+1} (j < k),  -Delta v_k = u_1^p.
inline SystemSpec polyharmonic_cascade(int n, int k, const PowerPair& pq) {
    if (k < 1) throw std::invalid_argument("polyharmonic_cascade: k >= 1 required");
    if (n <= 2 * k)
        throw not_applicable("polyharmonic_cascade: requires n > 2k (got n = " +
                             std::to_string(n) + ", k = " + std::to_string(k) + ")");
    const int L = 2 * k;
    SystemSpec s;
    s.n = n;
    s.L = L;
    s.rhs.resize(L);
    auto unit = [L](int j, double e) {
        std::vector<double> ex(L, 0.0);
        ex[j] = e;
        return ex;
    };
    for (int j = 0; j + 1 < k; ++j) s.rhs[j] = {Monomial(1.0, unit(j + 1, 1.0))};
    s.rhs[k - 1] = {Monomial(1.0, unit(k, pq.q))};
    for (int j = 0; j + 1 < k; ++j) s.rhs[k + j] = {Monomial(1.0, unit(k + j + 1, 1.0))};
    s.rhs[2 * k - 1] = {Monomial(1.0, unit(0, pq.p))};
    s.label = "cascade(n=" + std::to_string(n) + ",k=" + std::to_string(k) + ")";
    return s;
}

// (f_1(u), ..., f_L(u)) on the closed positive cone.
inline std::vector<double> eval_rhs(const SystemSpec& spec, const std::vector<double>& u) {
    if (u.size() != std::size_t(spec.L))
        throw std::invalid_argument("eval_rhs: u has wrong arity");
    for (double x : u)
        if (x < 0.0) throw std::domain_error("eval_rhs: u outside the closed positive cone");
    std::vector<double> f(spec.L, 0.0);
    for (int i = 0; i < spec.L; ++i)
        for (const auto& m : spec.rhs[i]) f[i] += m.eval(u);
    return f;
}

// Role map for a two-component power pair -Du1 = c1 u2^q, -Du2 = c2 u1^p.
// The component whose equation carries the power-p source (u2 here) decays
// like r^-alpha and plays "u" in the comparison/energy/Pohozaev statements;
// the other decays like r^-beta and plays "v". Power matching: if u1 ~ r^-s,
// u2 ~ r^-t then s+2 = q t and t+2 = p s, so t = alpha and s = beta.
struct PairRoles {
    double p = 0.0, q = 0.0;
    int alpha_index = 1;  // decays r^-alpha; "u" of the comparison principle
    int beta_index = 0;   // decays r^-beta;  "v"
    ExponentPair exps;

    double decay_of(int comp) const { return comp == alpha_index ? exps.alpha : exps.beta; }
};

inline std::optional<PairRoles> detect_pair_roles(const SystemSpec& spec) {
    if (spec.L != 2 || spec.rhs[0].size() != 1 || spec.rhs[1].size() != 1) return std::nullopt;
    const Monomial& m0 = spec.rhs[0][0];
    const Monomial& m1 = spec.rhs[1][0];
    if (m0.exponents[0] != 0.0 || m1.exponents[1] != 0.0) return std::nullopt;
    const double q = m0.exponents[1];
    const double p = m1.exponents[0];
    if (!(p > 0.0) || !(q > 0.0) || !(p * q > 1.0)) return std::nullopt;
    PairRoles roles;
    roles.p = p;
    roles.q = q;
    roles.alpha_index = 1;
    roles.beta_index = 0;
    roles.exps = make_exponents(PowerPair(p, q));
    return roles;
}

// Scalar -Du = u^p viewed as the symmetric p = q pair for exponent purposes.
inline std::optional<PairRoles> detect_scalar_roles(const SystemSpec& spec) {
    if (spec.L != 1 || spec.rhs[0].size() != 1) return std::nullopt;
    const double p = spec.rhs[0][0].exponents[0];
    if (!(p > 0.0) || !(p * p > 1.0)) return std::nullopt;
    PairRoles roles;
    roles.p = roles.q = p;
    roles.alpha_index = 0;
    roles.beta_index = 0;
    roles.exps = make_exponents(PowerPair(p, p));
    return roles;
}

}  // namespace hlslab
