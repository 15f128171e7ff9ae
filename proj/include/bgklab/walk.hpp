#pragma once

/**
 * @file walk.hpp
 * @brief Exponential sums over multiplicative subgroups, Gauss sums, the
 *        alternating walk X_k and its spectrum sets.
 *
 * For a subgroup H of F_p^x let S be uniform on H and
 *
 *     phi_S(a) = (1/|H|) sum_{x in H} e(ax/p).
 *
 * The walk X_k = S1 - S2 + ... + S_{2k-1} - S_{2k} has the real nonnegative
 * characteristic function |phi_S|^{2k}, and M_{X_k} = sum_a |phi_S(a)|^{4k}.
 * phi_S is constant on cosets aH, so everything here is evaluated once per
 * coset representative.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "bgklab/budget.hpp"
#include "bgklab/distributions.hpp"
#include "bgklab/fp_core.hpp"
#include "bgklab/numeric.hpp"
#include "bgklab/parallel.hpp"
#include "bgklab/report.hpp"
#include "bgklab/structured.hpp"

namespace bgklab {

inline constexpr std::uint64_t kExpansionMaxP = 20'000;
inline constexpr double kSpectrumGuard = 1e-9;

struct WalkSpec {
    Subgroup sub;
    std::uint64_t k;

    WalkSpec(Subgroup s, std::uint64_t steps) : sub(std::move(s)), k(steps) {
        if (k < 1) throw std::invalid_argument("WalkSpec: k must be >= 1");
    }
};

/// phi_S(a) by direct summation over H.
inline Complex subgroup_char_sum(const Subgroup& sub, Residue a) {
    const std::uint64_t p = sub.p();
    const std::uint64_t ar = a % p;
    if (ar == 0) return {1.0, 0.0};
    KahanComplex acc;
    for (Residue h : sub.elements()) acc += unit_root(ar * h % p, p);
    return acc.value() / static_cast<double>(sub.order());
}

/// phi_S tabulated on coset representatives.
class SubgroupFourier {
public:
    explicit SubgroupFourier(Subgroup sub) : sub_(std::move(sub)), reps_(cosets(sub_)) {
        const std::uint64_t p = sub_.p();
        const auto& f = sub_.field();
        coset_of_.assign(p, 0);
        for (std::size_t i = 0; i < reps_.size(); ++i) {
            for (Residue h : sub_.elements()) coset_of_[f.mul(reps_[i], h)] = static_cast<std::uint32_t>(i);
        }
        values_.resize(reps_.size());
        const double scale = 1.0 / static_cast<double>(sub_.order());
        if (p - 1 <= kScanRowTerms) {
            for (std::size_t i = 0; i < reps_.size(); ++i) values_[i] = subgroup_char_sum(sub_, reps_[i]);
        } else {
            std::vector<double> indicator(p, 0.0);
            for (Residue h : sub_.elements()) indicator[h] = 1.0;
            const auto all = forward_transform(indicator, TransformPath::chirp);
            for (std::size_t i = 0; i < reps_.size(); ++i) values_[i] = all[reps_[i]] * scale;
        }
        log_moduli_.resize(reps_.size());
        for (std::size_t i = 0; i < reps_.size(); ++i) {
            const double m = std::abs(values_[i]);
            log_moduli_[i] = m > 0.0 ? std::log(m) : -std::numeric_limits<double>::infinity();
        }
    }

    const Subgroup& sub() const noexcept { return sub_; }
    std::uint64_t p() const noexcept { return sub_.p(); }
    const std::vector<Residue>& coset_reps() const noexcept { return reps_; }
    const std::vector<Complex>& coset_values() const noexcept { return values_; }
    /// Index into coset_reps() of the coset containing a != 0.
    std::size_t coset_of(Residue a) const { return coset_of_.at(a); }

    Complex operator()(Residue a) const {
        a = static_cast<Residue>(a % p());
        return a == 0 ? Complex{1.0, 0.0} : values_[coset_of_[a]];
    }
    double modulus(Residue a) const { return std::abs((*this)(a)); }

    /// log sum_a |phi_S(a)|^e, a = 0 included.
    double log_moment(double e) const {
        std::vector<double> logs;
        logs.reserve(reps_.size() + 1);
        logs.push_back(0.0);
        const double log_h = std::log(static_cast<double>(sub_.order()));
        for (double lm : log_moduli_) {
            if (std::isfinite(lm)) logs.push_back(log_h + e * lm);
        }
        return log_sum_exp(logs);
    }

    /// max_{a != 0} |phi_S(a)|.
    double max_nonzero_modulus() const {
        double m = 0.0;
        for (const auto& v : values_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    Subgroup sub_;
    std::vector<Residue> reps_;
    std::vector<std::uint32_t> coset_of_;
    std::vector<Complex> values_;
    std::vector<double> log_moduli_;
};

// ---------------------------------------------------------------------------
// Gauss sums
// ---------------------------------------------------------------------------

struct GaussSumForms {
    Complex direct;          // sum_{x in F_p} e(a x^d / p)
    Complex subgroup_form;   // 1 + d sum_{y in H_d} e(a y / p)
    double discrepancy;
};

/// Both forms of G_d(a; p) for every a, sharing the x -> x^d table.
class GaussSumTable {
public:
    GaussSumTable(PrimeField field, std::uint64_t d) : field_(std::move(field)), d_(d), roots_(field_.p()) {
        const std::uint64_t p = field_.p();
        if (d == 0 || (p - 1) % d != 0) throw std::invalid_argument("gauss_sum: d does not divide p-1");
        powers_.resize(p);
        for (std::uint64_t x = 0; x < p; ++x) powers_[x] = field_.pow(static_cast<Residue>(x), d);
        subgroup_ = subgroup_of_order(field_, (p - 1) / d).elements();
    }

    std::uint64_t d() const noexcept { return d_; }

    GaussSumForms forms(Residue a) const {
        const std::uint64_t p = field_.p();
        const std::uint64_t ar = a % p;
        if (ar == 0) throw std::invalid_argument("gauss_sum: a must be nonzero");
        KahanComplex direct;
        for (Residue xd : powers_) direct += roots_.at(ar, xd);
        KahanComplex sub;
        for (Residue y : subgroup_) sub += roots_.at(ar, y);
        const Complex form = 1.0 + static_cast<double>(d_) * sub.value();
        return {direct.value(), form, std::abs(direct.value() - form)};
    }

private:
    PrimeField field_;
    std::uint64_t d_;
    RootTable roots_;
    std::vector<Residue> powers_;
    std::vector<Residue> subgroup_;
};

inline GaussSumForms gauss_sum_forms(const PrimeField& field, std::uint64_t d, Residue a) {
    return GaussSumTable(field, d).forms(a);
}

/// Direct value; the subgroup form must agree to 1e-9.
inline Complex gauss_sum(const PrimeField& field, std::uint64_t d, Residue a) {
    const auto forms = gauss_sum_forms(field, d, a);
    if (forms.discrepancy > kIdentityTolerance) {
        throw std::logic_error("gauss_sum: direct and subgroup forms differ by " +
                               format_real(forms.discrepancy));
    }
    return forms.direct;
}

// ---------------------------------------------------------------------------
// The walk X_k
// ---------------------------------------------------------------------------

inline std::vector<Complex> walk_values(const SubgroupFourier& F, std::uint64_t k) {
    const std::uint64_t p = F.p();
    std::vector<double> per_coset(F.coset_reps().size());
    for (std::size_t i = 0; i < per_coset.size(); ++i) {
        const double n2 = std::norm(F.coset_values()[i]);
        per_coset[i] = k > 30 ? abs_pow(std::abs(F.coset_values()[i]), 2.0 * static_cast<double>(k))
                              : std::pow(n2, static_cast<double>(k));
    }
    std::vector<Complex> out(p);
    out[0] = 1.0;
    for (std::uint64_t a = 1; a < p; ++a) out[a] = per_coset[F.coset_of(static_cast<Residue>(a))];
    return out;
}

/// phi_{X_k} = |phi_S|^{2k}.
inline CharFn walk_char_fn(const WalkSpec& spec) {
    const SubgroupFourier F(spec.sub);
    return CharFn(spec.sub.field(), walk_values(F, spec.k));
}

/// Density of X_k by inverse transform of |phi_S|^{2k}.
inline DistFp walk_distribution(const SubgroupFourier& F, std::uint64_t k) {
    auto rho = inverse_transform_real(walk_values(F, k));
    for (double& v : rho) {
        if (v < -kIdentityTolerance) throw std::logic_error("walk_distribution: negative mass");
        // Exact zeros come back as round-off of either sign.
        if (v <= 1e-15) v = 0.0;
    }
    return from_weights(F.sub().field(), std::move(rho));
}

inline DistFp walk_distribution(const WalkSpec& spec) {
    return walk_distribution(SubgroupFourier(spec.sub), spec.k);
}

/// M_{X_k} = sum_a |phi_S(a)|^{4k}, in log-sum-exp form.
inline double walk_mass(const SubgroupFourier& F, std::uint64_t k) {
    return std::exp(F.log_moment(4.0 * static_cast<double>(k)));
}

// ---------------------------------------------------------------------------
// Spectrum sets
// ---------------------------------------------------------------------------

/// Lambda_nu = {a : |phi_S(a)| > p^{-nu}}.
struct Spectrum {
    double nu;
    double threshold;                  // p^{-nu}
    std::vector<Residue> members;      // ascending, 0 first
    std::vector<Residue> coset_reps;   // representatives of the nonzero cosets inside
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return members.size(); }
    bool contains(Residue a) const { return std::binary_search(members.begin(), members.end(), a); }
};

inline Spectrum spectrum(const SubgroupFourier& F, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("spectrum: nu must be > 0");
    const auto& field = F.sub().field();
    Spectrum s{nu, std::pow(static_cast<double>(F.p()), -nu), {0}, {}, {}};
    for (std::size_t i = 0; i < F.coset_reps().size(); ++i) {
        const double m = std::abs(F.coset_values()[i]);
        const Residue rep = F.coset_reps()[i];
        if (std::abs(m - s.threshold) <= kSpectrumGuard) {
            s.warnings.push_back("spectrum: |phi_S(" + std::to_string(rep) + ")| = " + format_real(m) +
                                 " is within 1e-9 of p^-nu = " + format_real(s.threshold));
        }
        if (m > s.threshold) {
            s.coset_reps.push_back(rep);
            for (Residue h : F.sub().elements()) s.members.push_back(field.mul(rep, h));
        }
    }
    std::sort(s.members.begin(), s.members.end());
    return s;
}

inline Spectrum spectrum(const Subgroup& sub, double nu) { return spectrum(SubgroupFourier(sub), nu); }

// ---------------------------------------------------------------------------
// (k, nu) search
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kSearchStartK = 4;

struct SearchResult {
    double theta;
    std::uint64_t k;
    std::uint64_t k_plus;
    double nu;
    double M_k;
    std::size_t lambda_size;
    Spectrum lambda;
    std::vector<Json> iterations;
    Report report;

    bool pass() const { return report.pass(); }
};

/// First k along 4, k+ = ceil(k^2/theta), ... with M_{X_k} <= p^theta |Lambda_nu|,
/// nu = 1/k+.
inline SearchResult search_k_nu(const SubgroupFourier& F, double theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("search_k_nu: theta not in (0,1)");
    const double p = static_cast<double>(F.p());
    const double p_theta = std::pow(p, theta);
    const std::uint64_t limit = effective_budget(kSearchMaxK);

    Report rep("walk");
    rep.set_input("p", F.p());
    rep.set_input("subgroup_order", F.sub().order());
    rep.set_input("theta", theta);
    rep.set_quantity("k_plus_rule", "ceil(k^2/theta)");

    std::uint64_t k = kSearchStartK;
    std::vector<Json> trace;
    for (;;) {
        if (k > limit) {
            throw BudgetError("search_k_nu: k", k, limit);
        }
        const double kd = static_cast<double>(k);
        const auto k_plus = static_cast<std::uint64_t>(std::ceil(kd * kd / theta));
        const double nu = 1.0 / static_cast<double>(k_plus);
        const double M = walk_mass(F, k);
        Spectrum lam = spectrum(F, nu);
        const Spectrum lam_k = spectrum(F, 1.0 / kd);
        const double crude = static_cast<double>(lam_k.size()) + std::pow(p, -3.0);
        const bool crude_ok = M <= crude * (1.0 + 1e-12);
        const double lam_n = static_cast<double>(lam.size());
        const bool success = M <= p_theta * lam_n * (1.0 + 1e-12);

        rep.check_le("crude-bound.k=" + std::to_string(k), M, crude, 1e-12 * crude);
        trace.push_back(Json{{"k", k},
                             {"k_plus", k_plus},
                             {"nu", nu},
                             {"M_k", M},
                             {"lambda_size", lam.size()},
                             {"lambda_1_over_k_size", lam_k.size()},
                             {"crude_bound_ok", crude_ok},
                             {"success", success}});
        for (const auto& w : lam.warnings) rep.warn(w);
        if (!success) {
            k = k_plus;
            continue;
        }

        rep.set_quantity("k", k);
        rep.set_quantity("k_plus", k_plus);
        rep.set_quantity("nu", nu);
        rep.set_quantity("M_k", M);
        rep.set_quantity("lambda_size", lam.size());
        rep.set_quantity("lambda_coset_reps", lam.coset_reps);
        rep.set_quantity("iterations", trace.size());
        rep.check_le("pr-alt-2.4knu<=theta", 4.0 * kd * nu, theta, 1e-12);
        rep.check_ge("eq-m-bound.lower", M / p, std::pow(p, -1.0 - theta) * lam_n, 1e-12 * M / p);
        rep.check_le("eq-m-bound.upper", M / p, std::pow(p, -1.0 + theta) * lam_n, 1e-12 * M / p);
        if (F.p() <= kEagerCharFnMax) {
            const auto phi_2k = CharFn(F.sub().field(), walk_values(F, 2 * k));
            rep.check_close("eq-rho1.walk", density_at(phi_2k, 0), M / p, kIdentityTolerance);
        }
        for (const auto& row : trace) rep.add_trace(row);
        return SearchResult{theta, k, k_plus, nu, M, lam.size(), std::move(lam), std::move(trace),
                            std::move(rep)};
    }
}

inline SearchResult search_k_nu(const Subgroup& sub, double theta) {
    return search_k_nu(SubgroupFourier(sub), theta);
}

// ---------------------------------------------------------------------------
// Expansion inequality
// ---------------------------------------------------------------------------

/// Tables for E(|phi_{X_k}(a X_k)|^2) >= phi_{X_k}(a)^{4k} at every a.
class ExpansionCheck {
public:
    explicit ExpansionCheck(const WalkSpec& spec) : spec_(spec), F_(spec.sub) {
        const std::uint64_t p = F_.p();
        if (p > kExpansionMaxP) {
            throw std::invalid_argument("verify_expansion_inequality: p > " + std::to_string(kExpansionMaxP));
        }
        charge("verify_expansion_inequality", p * p, kQuadraticExpectationTerms);
        const auto phi = walk_values(F_, spec.k);
        phi_.resize(p);
        for (std::uint64_t a = 0; a < p; ++a) phi_[a] = phi[a].real();
        const DistFp xk = walk_distribution(F_, spec.k);
        const DistFp x2k = walk_distribution(F_, 2 * spec.k);
        rho_k_.assign(xk.density().begin(), xk.density().end());
        rho_2k_.assign(x2k.density().begin(), x2k.density().end());
    }

    const WalkSpec& spec() const noexcept { return spec_; }

    Report check(Residue a) const {
        const std::uint64_t p = F_.p();
        a = static_cast<Residue>(a % p);
        KahanSum lhs;
        KahanSum mid;
        std::uint64_t idx = 0;  // a * x mod p
        for (std::uint64_t x = 0; x < p; ++x) {
            lhs += rho_k_[x] * phi_[idx] * phi_[idx];
            mid += rho_2k_[x] * phi_[idx];
            idx += a;
            if (idx >= p) idx -= p;
        }
        const double k4 = 4.0 * static_cast<double>(spec_.k);
        const double rhs = abs_pow(phi_[a], k4);
        const double literal = abs_pow(F_.modulus(a), k4);

        Report rep("expansion");
        rep.set_input("p", p);
        rep.set_input("subgroup_order", spec_.sub.order());
        rep.set_input("k", spec_.k);
        rep.set_input("a", a);
        rep.set_quantity("lhs", lhs.value());
        rep.set_quantity("rhs_proof_chain", rhs);
        rep.set_quantity("rhs_literal", literal);
        rep.set_quantity("literal_reading_holds", lhs.value() >= literal - kIdentityTolerance);
        rep.check_close("eq-expansion.identity", lhs.value(), mid.value(), kIdentityTolerance);
        rep.check_ge("eq-expansion", lhs.value(), rhs, kIdentityTolerance);
        return rep;
    }

private:
    WalkSpec spec_;
    SubgroupFourier F_;
    std::vector<double> phi_;
    std::vector<double> rho_k_;
    std::vector<double> rho_2k_;
};

inline Report verify_expansion_inequality(const WalkSpec& spec, Residue a) {
    return ExpansionCheck(spec).check(a);
}

// ---------------------------------------------------------------------------
// Scan over primes and subgroups
// ---------------------------------------------------------------------------

struct ScanRow {
    std::uint64_t p;
    std::uint64_t subgroup_order;
    double max_abs_sum;  // max_{a != 0} |sum_{x in H} e(ax/p)|
    double normalized;   // max_abs_sum / |H|
    bool sqrt_p_ok;
};

inline ScanRow scan_row(const PrimeField& field, std::uint64_t n) {
    const SubgroupFourier F(subgroup_of_order(field, n));
    const double nd = static_cast<double>(n);
    const double m = F.max_nonzero_modulus() * nd;
    const double p = static_cast<double>(field.p());
    return {field.p(), n, m, m / nd, m <= std::sqrt(p) + 1e-6};
}

namespace detail {

/// Rows for every prime in [p_lo, p_hi] and every n | p-1 with n >= p^gamma
/// (every n when gamma = 0), ordered by (p, n).
inline std::vector<ScanRow> scan_rows(std::uint64_t p_lo, std::uint64_t p_hi, double gamma, unsigned jobs) {
    if (p_lo > p_hi) throw std::invalid_argument("theorem_scan: empty range");
    if (p_hi > kMaxModulus) throw std::invalid_argument("theorem_scan: p above 2^31 - 1");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> keys;
    for (std::uint64_t p : primes_in(p_lo, p_hi)) {
        const double floor_n = gamma == 0.0 ? 0.0 : std::pow(static_cast<double>(p), gamma) * (1.0 - 1e-12);
        for (std::uint64_t n : divisors(p - 1)) {
            if (static_cast<double>(n) >= floor_n) keys.emplace_back(p, n);
        }
    }
    return parallel_map<ScanRow>(keys.size(), jobs, [&keys](std::size_t i) {
        return scan_row(PrimeField(keys[i].first), keys[i].second);
    });
}

}  // namespace detail

/// Rows for every prime in [p_lo, p_hi] and every n | p-1 with n >= p^gamma,
/// ordered by (p, n).
inline std::vector<ScanRow> theorem_scan(std::uint64_t p_lo, std::uint64_t p_hi, double gamma,
                                         unsigned jobs = 1) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("theorem_scan: gamma not in (0,1]");
    return detail::scan_rows(p_lo, p_hi, gamma, jobs);
}

/// Every subgroup of every prime in range, the trivial one included.
inline std::vector<ScanRow> all_subgroups_scan(std::uint64_t p_lo, std::uint64_t p_hi, unsigned jobs = 1) {
    return detail::scan_rows(p_lo, p_hi, 0.0, jobs);
}

inline std::string scan_csv(const std::vector<ScanRow>& rows) {
    std::string out = "p,subgroup_order,max_abs_sum,normalized,sqrt_p_ok\n";
    for (const auto& r : rows) {
        out += std::to_string(r.p) + "," + std::to_string(r.subgroup_order) + "," +
               format_real(r.max_abs_sum) + "," + format_real(r.normalized) + "," +
               (r.sqrt_p_ok ? "true" : "false") + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Final chain
// ---------------------------------------------------------------------------

/// Quantities for X = X_k, Y = X_{2k} at the searched k, and the lower bound
/// E(|phi_X(X Yhat)|^2) >= p^{-10 theta} where the double sum is affordable.
inline Report check_last_bound(const SubgroupFourier& F, const SearchResult& search) {
    Report rep("chain");
    const double p = static_cast<double>(F.p());
    const std::uint64_t k = search.k;
    const double kd = static_cast<double>(k);
    const double nu = search.nu;
    const double lam = static_cast<double>(search.lambda_size);
    const double theta = search.theta;

    // rho_X(0) = (1/p) sum_a |phi_S(a)|^{2k},  rho_Y(0) = M_{X_k}/p.
    const double rho_X0 = std::exp(F.log_moment(2.0 * kd)) / p;
    const double rho_Y0 = search.M_k / p;
    rep.set_quantity("rho_X(0)", rho_X0);
    rep.set_quantity("rho_Y(0)", rho_Y0);
    rep.set_quantity("p^(-10theta)", std::pow(p, -10.0 * theta));

    // Through the spectrum: for a in Lambda_nu, |phi_X(a)|^2 > p^{-4k nu}, and the
    // expansion inequality gives E|phi_X(aX)|^2 >= p^{-8k^2 nu}.
    const double log_chain =
        std::log(lam) - std::log(search.M_k) - (4.0 * kd * nu + 8.0 * kd * kd * nu) * std::log(p);
    rep.set_quantity("chain_lower_bound", std::exp(log_chain));

    if (F.p() > kExpansionMaxP || !within_budget(F.p() * F.p(), kQuadraticExpectationTerms)) {
        rep.warn("eq-last-bound not evaluated: p above " + std::to_string(kExpansionMaxP) +
                 " or quadratic budget exceeded");
        return rep;
    }
    const DistFp X = walk_distribution(F, k);
    const CharFn phi_X(F.sub().field(), walk_values(F, k));
    const double twisted = twisted_fourth_moment(X, phi_X);
    rep.set_quantity("twisted_fourth_moment", twisted);
    rep.check_close("eq-rho0.walk", X.collision_mass(), rho_Y0, kIdentityTolerance);
    rep.check_close("rho_X(0).walk", X(0), rho_X0, kIdentityTolerance);
    rep.check_ge("eq-last-bound.chain", twisted, std::exp(log_chain), 1e-12);
    rep.check_ge("eq-last-bound", twisted, std::pow(p, -10.0 * theta), 1e-12);
    return rep;
}

/// Runs the search, then evaluates every quantity of the closing argument
/// for X = X_k and Y = X_{2k}. Exact identities and the p^{-10 theta} lower
/// bound are asserted; the asymptotic comparison is only reported.
inline Report final_chain_report(const Subgroup& sub, double gamma, double theta, double eta) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("final_chain_report: gamma not in (0,1]");
    if (!(theta > 0.0 && 10.0 * theta < gamma)) {
        throw std::invalid_argument("final_chain_report: need 0 < 10 theta < gamma");
    }
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("final_chain_report: eta not in (0,1)");
    const double p = static_cast<double>(sub.p());
    const double h = static_cast<double>(sub.order());
    if (h < std::pow(p, gamma) * (1.0 - 1e-12)) {
        throw std::invalid_argument("final_chain_report: |H| < p^gamma");
    }

    const SubgroupFourier F(sub);
    SearchResult search = search_k_nu(F, theta);
    Report rep("chain");
    rep.set_input("p", sub.p());
    rep.set_input("subgroup_order", sub.order());
    rep.set_input("gamma", gamma);
    rep.set_input("theta", theta);
    rep.set_input("eta", eta);
    rep.absorb(search.report, "search");
    for (const auto& w : search.lambda.warnings) rep.warn(w);

    const std::uint64_t k = search.k;
    const double nu = search.nu;
    const double lam = static_cast<double>(search.lambda_size);

    // Chebyshev bound from Parseval: |Lambda_nu| p^{-2nu} <= sum |phi_S|^2 = p/|H|.
    const double parseval = std::exp(F.log_moment(2.0));
    rep.check_close("lm-uniform-properties.parseval", parseval, p / h, kIdentityTolerance * p);
    rep.check_le("th-bgk.lambda-chebyshev", lam, std::pow(p, 1.0 + 2.0 * nu) / h, 1e-9);
    rep.set_quantity("lambda_size.nu", search.lambda_size);
    rep.set_quantity("lambda_size.1/k", spectrum(F, 1.0 / static_cast<double>(k)).size());

    rep.absorb(check_last_bound(F, search), "");
    if (sub.p() <= 2003 && rep.quantities().count("twisted_fourth_moment") > 0) {
        rep.absorb(alt1_report(walk_distribution(F, search.k), eta), "pr-alt-1");
    }
    const double rho_Y0 = search.M_k / p;
    rep.set_quantity("p^(-1+eta)/rho_Y(0)", std::pow(p, -1.0 + eta) / rho_Y0);
    return rep;
}

}  // namespace bgklab
