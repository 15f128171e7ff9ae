#pragma once

/**
 * @file structured.hpp
 * @brief Energy lemmas, the twisted fourth moment, and extraction of a set
 *        with small sum and product doubling from a random variable on F_p.
 *
 * Notation: X is an F_p-valued random variable, Y = X1 - X2 its additive
 * stepping and Yhat its peaking. The central quantity is
 *
 *     E(|phi_X(X Yhat)|^2) = (1/M_X) sum_x sum_a rho_X(x) |phi_X(a)|^2 |phi_X(ax)|^2,
 *
 * which equals E(rho_Y(XY)) / rho_Y(0). Its reciprocal alpha drives the
 * extraction pipeline
 *
 *     A1 = {y : rho_Y(y) >= rho_Y(0) / 8 alpha},   A2 = A1 \ {0},
 *     A3 = BSG of A2 in (F_p^x, *) at level 2^25 alpha^9,
 *     A4 = BSG of A3 in (F_p, +)   at level 2^144 alpha^49,
 *
 * and every intermediate bound of the argument is recorded and checked.
 */

#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bgklab/bsg.hpp"
#include "bgklab/budget.hpp"
#include "bgklab/distributions.hpp"
#include "bgklab/report.hpp"
#include "bgklab/setstats.hpp"

namespace bgklab {

// ---------------------------------------------------------------------------
// Twisted fourth moment and the stepping/peaking link
// ---------------------------------------------------------------------------

/// E(|phi(X Yhat)|^2) with Yhat the peaking of phi. `phi` must be the
/// characteristic function of X.
inline double twisted_fourth_moment(const DistFp& X, const CharFn& phi) {
    const std::uint64_t p = X.p();
    charge("twisted_fourth_moment", std::uint64_t{X.support().size()} * p, kQuadraticExpectationTerms);
    const auto values = phi.values();
    std::vector<double> sq(p);
    KahanSum mass;
    for (std::uint64_t a = 0; a < p; ++a) {
        sq[a] = std::norm(values[a]);
        mass += sq[a];
    }
    KahanSum outer;
    for (Residue x : X.support()) {
        KahanSum inner;
        std::uint64_t idx = 0;  // a * x mod p
        for (std::uint64_t a = 0; a < p; ++a) {
            inner += sq[a] * sq[idx];
            idx += x;
            if (idx >= p) idx -= p;
        }
        outer += X(x) * inner.value();
    }
    return outer.value() / mass.value();
}

inline double twisted_fourth_moment(const DistFp& X) { return twisted_fourth_moment(X, char_fn(X)); }

/// E(rho_Y(XY)) for independent X ~ X and Y ~ Y, by direct double sum.
inline double expected_density_at_product(const DistFp& X, const DistFp& Y) {
    charge("expected_density_at_product", std::uint64_t{X.support().size()} * Y.support().size(),
           kQuadraticExpectationTerms);
    const auto& f = X.field();
    KahanSum outer;
    for (Residue x : X.support()) {
        KahanSum inner;
        for (Residue y : Y.support()) inner += Y(y) * Y(f.mul(x, y));
        outer += X(x) * inner.value();
    }
    return outer.value();
}

/// E(rho_Y(XY)) = rho_Y(0) E(|phi_X(X Yhat)|^2).
inline Report verify_link2(const DistFp& X) {
    Report rep("link2");
    const DistFp Y = stepping(X, GroupCtx(X.field(), GroupMode::additive));
    const double lhs = expected_density_at_product(X, Y);
    const double twisted = twisted_fourth_moment(X);
    rep.set_quantity("p", X.p());
    rep.set_quantity("E_rho_Y_XY", lhs);
    rep.set_quantity("rho_Y(0)", Y(0));
    rep.set_quantity("twisted_fourth_moment", twisted);
    rep.check_close("lm-bgk-link2", lhs, Y(0) * twisted, kIdentityTolerance);
    return rep;
}

// ---------------------------------------------------------------------------
// Energy lemmas
// ---------------------------------------------------------------------------

namespace detail {

/// e(A) >= 1 / (4 beta^4 rho_Y(0) |A|) given E(r_{A.A^{-1}}(X)) >= |A| / beta.
/// r is extended by zero off the context carrier, and rho_Y(0) is the
/// collision mass sum_x rho_X(x)^2 of X on all of F_p.
inline void energy_bound_rows(Report& rep, const std::string& prefix, const DistFp& X, const FpSet& A,
                              double beta, double e_A) {
    const double n = static_cast<double>(A.size());
    const double rho0 = X.collision_mass();
    const double log2_rhs = -(2.0 + 4.0 * std::log2(beta) + std::log2(rho0) + std::log2(n));
    check_ge_log2(rep, prefix, e_A, log2_rhs, 1e-9);
}

}  // namespace detail

inline Report check_lemma_energy(const DistFp& X, const FpSet& A, const GroupCtx& ctx) {
    Report rep("lemma_energy");
    if (A.empty()) throw std::invalid_argument("check_lemma_energy: empty set");
    if (!(A.ctx() == ctx) || !(ctx.field() == X.field())) {
        throw std::invalid_argument("check_lemma_energy: context mismatch");
    }
    const RepFn r = ratio_rep_fn(A);
    const double er = expectation(r.as_reals(), X);
    rep.set_input("mode", to_string(ctx.mode()));
    rep.set_quantity("E_r_X", er);
    rep.set_quantity("set_size", A.size());
    if (!ctx.additive()) rep.set_quantity("mass_off_zero", 1.0 - X(0));
    if (er <= 0.0) {
        rep.set_quantity("skipped", true);
        rep.warn("hypothesis vacuous: E(r(X)) = 0");
        return rep;
    }
    const double beta = static_cast<double>(A.size()) / er;
    const double e_A = normalized_energy(A);
    rep.set_quantity("beta", beta);
    rep.set_quantity("rho_Y(0)", X.collision_mass());
    rep.set_quantity("e(A)", e_A);
    rep.check_ge("lm-random-energy.beta>=1", beta, 1.0, 1e-12);
    detail::energy_bound_rows(rep, "lm-random-energy", X, A, beta, e_A);
    return rep;
}

/// e(B) >= 1/(4 alpha^9 beta^4) for B inside the alpha-level set of the
/// ctx-stepping Y of X with |B| >= 1/(beta rho_Y(0)). Hypotheses are checked
/// first; when one fails the report is marked skipped.
inline Report check_lemma_stepping(const DistFp& X, const FpSet& B, double alpha, double beta,
                                   const GroupCtx& ctx) {
    Report rep("lemma_stepping");
    rep.set_input("mode", to_string(ctx.mode()));
    rep.set_input("alpha", alpha);
    rep.set_input("beta", beta);
    auto skip = [&rep](const std::string& why) {
        rep.set_quantity("skipped", true);
        rep.warn("precondition not met: " + why);
        return rep;
    };
    if (!(B.ctx() == ctx) || !(ctx.field() == X.field())) {
        throw std::invalid_argument("check_lemma_stepping: context mismatch");
    }
    if (B.empty()) return skip("B is empty");
    if (!(alpha >= 1.0)) return skip("alpha < 1");
    if (!(beta > 0.0)) return skip("beta <= 0");
    if (!ctx.additive() && X(0) > 0.0) return skip("multiplicative stepping of a variable with mass at 0");

    const DistFp Y = stepping(X, ctx);
    const double rho0 = Y(ctx.identity());
    const double level = rho0 / alpha;
    for (Residue b : B) {
        if (Y(b) < level * (1.0 - 1e-12)) return skip("B is not inside the level set");
    }
    const double b = static_cast<double>(B.size());
    if (b * rho0 * beta < 1.0 - 1e-12) return skip("|B| < 1/(beta rho_Y(0))");

    const double e_B = normalized_energy(B);
    rep.set_quantity("rho_Y(identity)", rho0);
    rep.set_quantity("set_size", B.size());
    rep.set_quantity("e(B)", e_B);
    check_ge_log2(rep, "lm-stepping", e_B, -(2.0 + 9.0 * std::log2(alpha) + 4.0 * std::log2(beta)),
                  1e-12);
    return rep;
}

// ---------------------------------------------------------------------------
// Structured-set extraction
// ---------------------------------------------------------------------------

/// The P(X=0) <= 1/4alpha, P(Y=0) <= 1/4alpha conditions failed.
struct ConditionsFail {
    double rho_X0;
    double rho_Y0;
    double alpha;
};

struct ExtractCertificate {
    double alpha;
    double rho_X0;
    double rho_Y0;
    double expected_density;  // E(rho_Y(XY))
    FpSet A1, A2, A3, A4;
    double e_A2;
    double e_A3;
    std::size_t A4_sum_size;
    std::size_t A4_prod_size;
    Report report;

    bool pass() const { return report.pass(); }
};

using ExtractOutcome = std::variant<ExtractCertificate, ConditionsFail>;

inline ExtractOutcome extract_structured(const DistFp& X) {
    const auto& field = X.field();
    const GroupCtx add(field, GroupMode::additive);
    const GroupCtx mul(field, GroupMode::multiplicative);
    const double p = static_cast<double>(field.p());

    const DistFp Y = stepping(X, add);
    const double rho_X0 = X(0);
    const double rho_Y0 = Y(0);
    const double expected = expected_density_at_product(X, Y);
    // alpha is defined by equality in E(rho_Y(XY)) >= rho_Y(0)/alpha; it is >= 1
    // exactly, so round-off below 1 is clamped.
    const double alpha = std::max(1.0, rho_Y0 / expected);
    const double la = std::log2(alpha);

    if (rho_X0 > 1.0 / (4.0 * alpha) || rho_Y0 > 1.0 / (4.0 * alpha)) {
        return ConditionsFail{rho_X0, rho_Y0, alpha};
    }

    Report rep("extract");
    rep.set_input("p", field.p());
    rep.set_quantity("alpha", alpha);
    rep.set_quantity("rho_X(0)", rho_X0);
    rep.set_quantity("rho_Y(0)", rho_Y0);
    rep.set_quantity("E_rho_Y_XY", expected);
    rep.check_le("eq-bgk-cond1.X", rho_X0, 1.0 / (4.0 * alpha));
    rep.check_le("eq-bgk-cond1.Y", rho_Y0, 1.0 / (4.0 * alpha));

    // A1, A2
    std::vector<Residue> a1;
    const double level = rho_Y0 / (8.0 * alpha);
    for (std::uint64_t y = 0; y < field.p(); ++y) {
        if (Y(static_cast<Residue>(y)) >= level * (1.0 - 1e-12)) a1.push_back(static_cast<Residue>(y));
    }
    FpSet A1(add, a1);
    std::vector<Residue> a2;
    for (Residue y : a1) {
        if (y != 0) a2.push_back(y);
    }
    FpSet A2(mul, a2);
    const double n2 = static_cast<double>(A2.size());
    rep.set_quantity("A1_size", A1.size());
    rep.set_quantity("A2_size", A2.size());
    rep.check_true("chain.zero_in_A1", A1.contains(0));
    rep.check_ge("eq-bgk-lb2.lower", n2, 1.0 / (4.0 * alpha * rho_Y0), 1e-9);
    rep.check_le("eq-bgk-lb2.upper", n2, 8.0 * alpha / rho_Y0, 1e-9);
    if (A2.empty()) {
        rep.check_true("chain.A2_nonempty", false);
        return ExtractCertificate{alpha, rho_X0, rho_Y0, expected, A1, A2, A2, A2, 0, 0, 0, 0, rep};
    }

    // E(r2(X)) with r2 = r_{A2.A2^{-1}} on F_p^x, extended by r2(0) = 0.
    const RepFn r2 = ratio_rep_fn(A2);
    const double er2 = expectation(r2.as_reals(), X);
    rep.set_quantity("E_r2_X", er2);
    rep.check_ge("eq-r2-lb", er2, n2 / (32.0 * alpha * alpha), 1e-9);

    const double e_A2 = normalized_energy(A2);
    rep.set_quantity("e(A2)", e_A2);
    detail::energy_bound_rows(rep, "lm-random-energy.A2", X, A2, 32.0 * alpha * alpha, e_A2);
    check_ge_log2(rep, "e(A2).lb", e_A2, -(25.0 + 9.0 * la), 1e-12);

    // First extraction, multiplicative.
    BsgCertificate first = bsg(A2, std::exp2(25.0 + 9.0 * la));
    rep.absorb(first.report, "bsg.mult");
    FpSet A3(add, first.B.elements());
    const double n3 = static_cast<double>(A3.size());
    rep.set_quantity("A3_size", A3.size());
    rep.check_true("chain.A3_subset_A2", first.B.subset_of(A2));
    check_ge_log2(rep, "A3.size.lb", n3, -(29.0 + 10.0 * la + std::log2(rho_Y0)), 1e-12);
    const std::size_t a3_prod = op_set(first.B, first.B).size();
    check_le_log2(rep, "A3.doubling.ub", static_cast<double>(a3_prod), 164.0 + 54.0 * la + std::log2(n3));

    // Additive energy of A3 via the stepping lemma with (8 alpha, 2^29 alpha^10).
    const double e_A3 = normalized_energy(A3);
    rep.set_quantity("e(A3)", e_A3);
    rep.absorb(check_lemma_stepping(X, A3, 8.0 * alpha, std::exp2(29.0 + 10.0 * la), add),
               "A3");
    check_ge_log2(rep, "e(A3).lb", e_A3, -(144.0 + 49.0 * la), 1e-12);

    // Second extraction, additive.
    BsgCertificate second = bsg(A3, std::exp2(144.0 + 49.0 * la));
    rep.absorb(second.report, "bsg.add");
    FpSet A4 = second.B;
    const double n4 = static_cast<double>(A4.size());
    rep.check_true("chain.A4_subset_A3", A4.subset_of(A3));
    rep.check_true("chain.A4_in_Fp_units", !A4.contains(0));

    const std::size_t sums = op_set(A4, A4).size();
    const FpSet A4m(mul, A4.elements());
    const std::size_t prods = op_set(A4m, A4m).size();
    rep.set_quantity("A4_size", A4.size());
    rep.set_quantity("A4_sum_size", sums);
    rep.set_quantity("A4_prod_size", prods);

    check_ge_log2(rep, "pr-exp-1.size.lower", n4, -(31.0 + 10.0 * la + std::log2(rho_Y0)), 1e-12);
    rep.check_le("pr-exp-1.size.upper", n4, 8.0 * alpha / rho_Y0, 1e-9);
    check_le_log2(rep, "pr-exp-1.doubling", static_cast<double>(std::max(sums, prods)),
                  878.0 + 294.0 * la + std::log2(std::max(n4, 1.0)));
    rep.set_quantity("p", p);

    return ExtractCertificate{alpha, rho_X0, rho_Y0, expected, std::move(A1), std::move(A2),
                              std::move(A3), std::move(A4), e_A2, e_A3, sums, prods, std::move(rep)};
}

// ---------------------------------------------------------------------------
// Case analysis report
// ---------------------------------------------------------------------------

/// Classifies X into: case 0 (small-mass conditions fail), case 1
/// (|A4| <= p^{1-eta}, sum-product regime) or case 2 (|A4| > p^{1-eta}).
inline Report alt1_report(const DistFp& X, double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("alt1_report: eta not in (0,1)");
    Report rep("extract");
    const double p = static_cast<double>(X.p());
    const double twisted = twisted_fourth_moment(X);
    const double alpha = std::max(1.0, 1.0 / twisted);
    rep.set_input("p", X.p());
    rep.set_input("eta", eta);
    rep.set_quantity("twisted_fourth_moment", twisted);
    rep.set_quantity("alpha_from_moment", alpha);
    rep.check_ge("rm-comments.lower.rho_X(0)", twisted, X(0), kIdentityTolerance);

    const auto outcome = extract_structured(X);
    if (const auto* fail = std::get_if<ConditionsFail>(&outcome)) {
        rep.set_quantity("case", 0);
        rep.set_quantity("rho_X(0)", fail->rho_X0);
        rep.set_quantity("rho_Y(0)", fail->rho_Y0);
        rep.set_quantity("alpha", fail->alpha);
        rep.set_quantity("conditions", "fail");
        rep.check_le("eq-estimate.case0", twisted, 4.0 * (fail->rho_X0 + fail->rho_Y0), kIdentityTolerance);
        return rep;
    }
    const auto& cert = std::get<ExtractCertificate>(outcome);
    rep.absorb(cert.report, "");
    rep.set_quantity("conditions", "hold");
    rep.set_quantity("alpha", cert.alpha);
    rep.check_close("alpha.agreement", 1.0 / alpha, 1.0 / cert.alpha, kIdentityTolerance);
    const double n4 = static_cast<double>(cert.A4.size());
    const double cutoff = std::pow(p, 1.0 - eta);
    rep.set_quantity("p^(1-eta)", cutoff);
    rep.set_quantity("p^(-1+eta)/rho_Y(0)", std::pow(p, -1.0 + eta) / cert.rho_Y0);
    if (n4 <= cutoff) {
        rep.set_quantity("case", 1);
        const double doubling = static_cast<double>(std::max(cert.A4_sum_size, cert.A4_prod_size)) / n4;
        rep.set_quantity("A4_doubling", doubling);
        if (cert.A4.size() >= 2) {
            const auto stats = expansion_stats(X.field(), cert.A4.elements());
            rep.set_quantity("A4_expansion_exponent", stats.exponent);
        }
    } else {
        rep.set_quantity("case", 2);
        rep.set_quantity("1/(|A4| rho_Y(0))", 1.0 / (n4 * cert.rho_Y0));
        rep.check_le("eq-estimate.case2", twisted, 8.0 / (n4 * cert.rho_Y0), kIdentityTolerance);
    }
    return rep;
}

}  // namespace bgklab
