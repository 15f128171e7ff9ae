#pragma once

/**
 * @file bsg.hpp
 * @brief Derandomized Balog-Szemeredi-Gowers extraction (Schoen's argument).
 *
 * Given A with e(A) >= 1/alpha, find_pivot() picks the element x used to
 * form C = A n A.x, and bsg() refines C into B subset of A with
 *
 *     |B| >= |A| / (4 alpha),     |B.B^{-1}| <= 2^14 alpha^6 |B|.
 *
 * The probabilistic proof draws x with probability r(x)/|A|^2, where r is
 * the representation function of A.A^{-1}. Here candidates are scanned in
 * descending r(x), ties by ascending residue, and the first x whose score
 *
 *     f(x) = |C|^2 - delta^{-1} |{(a, b) in C^2 : r(ab^{-1}) < gamma |A|}|,
 *     gamma = delta / (2 alpha^2),
 *
 * reaches |A|^2 / (2 alpha^2) is returned. Such an x exists because the
 * r-weighted average of f is at least that large.
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bgklab/budget.hpp"
#include "bgklab/report.hpp"
#include "bgklab/setstats.hpp"

namespace bgklab {

inline constexpr double kBsgDelta = 0.1;

struct Pivot {
    Residue x;
    FpSet C;
    double score;            // f(x)
    double target;           // |A|^2 / (2 alpha^2)
    std::size_t candidates;  // pivots examined, including x
};

namespace detail {

/// C = A n A.x = {a in A : a x^{-1} in A}.
inline FpSet pivot_slice(const FpSet& A, const std::vector<char>& maskA, Residue x) {
    const auto& ctx = A.ctx();
    const Residue x_inv = ctx.inv(x);
    std::vector<Residue> c;
    for (Residue a : A) {
        if (maskA[ctx.op(a, x_inv)]) c.push_back(a);
    }
    return FpSet(ctx, std::move(c));
}

/// #{(a, b) in C^2 : r(ab^{-1}) < threshold}.
inline std::uint64_t count_sparse_pairs(const FpSet& C, const RepFn& r, double threshold) {
    // a, b in A always gives r(ab^{-1}) >= 1.
    if (threshold <= 1.0) return 0;
    const auto& ctx = C.ctx();
    std::vector<Residue> inverses;
    inverses.reserve(C.size());
    for (Residue b : C) inverses.push_back(ctx.inv(b));
    std::uint64_t bad = 0;
    for (Residue a : C) {
        for (Residue b_inv : inverses) {
            if (static_cast<double>(r(ctx.op(a, b_inv))) < threshold) ++bad;
        }
    }
    return bad;
}

inline Pivot find_pivot_with(const FpSet& A, const RepFn& r, double alpha, double delta) {
    const double n = static_cast<double>(A.size());
    const double threshold = delta / (2.0 * alpha * alpha) * n;
    const double target = n * n / (2.0 * alpha * alpha);

    std::vector<Residue> order = r.support();
    std::stable_sort(order.begin(), order.end(),
                     [&](Residue u, Residue v) { return r(u) > r(v); });

    const auto maskA = A.mask();
    std::uint64_t spent = 0;
    std::size_t tried = 0;
    for (Residue x : order) {
        ++tried;
        FpSet C = pivot_slice(A, maskA, x);
        const double c = static_cast<double>(C.size());
        if (threshold > 1.0) {
            spent += std::uint64_t{C.size()} * C.size();
            charge("find_pivot", spent, kPivotPairTerms);
        }
        const double score = c * c - static_cast<double>(count_sparse_pairs(C, r, threshold)) / delta;
        if (score >= target * (1.0 - 1e-12)) return {x, std::move(C), score, target, tried};
    }
    throw std::logic_error("find_pivot: no admissible pivot; the averaging bound was violated");
}

}  // namespace detail

inline Pivot find_pivot(const FpSet& A, double alpha, double delta) {
    if (A.empty()) throw std::invalid_argument("find_pivot: empty set");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("find_pivot: delta not in (0,1)");
    if (!(alpha >= 1.0)) throw std::invalid_argument("find_pivot: alpha must be >= 1");
    const double e = normalized_energy(A);
    if (e * alpha < 1.0 - 1e-12) {
        throw std::invalid_argument("find_pivot: e(A) = " + format_real(e) + " < 1/alpha");
    }
    return detail::find_pivot_with(A, ratio_rep_fn(A), alpha, delta);
}

struct BsgCertificate {
    FpSet A;
    double alpha;
    double delta;
    Residue pivot;
    FpSet C;
    double y_threshold;  // delta |A| / (2 alpha^2)
    std::size_t y_size;
    FpSet B;
    std::size_t ratio_set_size;  // |B.B^{-1}|
    double ratio;                // |B.B^{-1}| / |B|
    Report report;

    bool pass() const { return report.pass(); }
};

/// Extraction with delta = 1/10; alpha defaults to 1/e(A).
inline BsgCertificate bsg(const FpSet& A, std::optional<double> alpha_in = std::nullopt) {
    if (A.empty()) throw std::invalid_argument("bsg: empty set");
    const auto& ctx = A.ctx();
    const double e = normalized_energy(A);
    const double alpha = alpha_in.value_or(1.0 / e);
    if (!(alpha >= 1.0)) throw std::invalid_argument("bsg: alpha must be >= 1");
    if (e * alpha < 1.0 - 1e-12) {
        throw std::invalid_argument("bsg: e(A) = " + format_real(e) + " < 1/alpha");
    }
    const double delta = kBsgDelta;
    const double n = static_cast<double>(A.size());

    const RepFn r = ratio_rep_fn(A);
    Pivot pivot = detail::find_pivot_with(A, r, alpha, delta);
    const FpSet& C = pivot.C;
    const double c = static_cast<double>(C.size());

    Report rep("bsg");
    rep.set_input("mode", to_string(ctx.mode()));
    rep.set_input("p", ctx.p());
    rep.set_input("set_size", A.size());
    rep.set_quantity("e(A)", e);
    rep.set_quantity("alpha", alpha);
    rep.set_quantity("log2_alpha", std::log2(alpha));
    rep.set_quantity("delta", delta);
    rep.set_quantity("pivot", pivot.x);
    rep.set_quantity("pivot_candidates", pivot.candidates);
    rep.set_quantity("C_size", C.size());

    std::vector<Residue> c_inv;
    c_inv.reserve(C.size());
    for (Residue v : C) c_inv.push_back(ctx.inv(v));

    // Pivot guarantees, recomputed from scratch.
    const double y_threshold = delta * n / (2.0 * alpha * alpha);
    rep.check_ge("eq-schoen-3", pivot.score, pivot.target, 1e-12 * pivot.target);
    rep.check_ge("eq-schoen-1", c, n / (2.0 * alpha), 1e-12);
    {
        std::uint64_t dense = 0;
        for (Residue a : C) {
            for (Residue b_inv : c_inv) {
                if (static_cast<double>(r(ctx.op(a, b_inv))) >= y_threshold) ++dense;
            }
        }
        rep.check_ge("eq-schoen-2", static_cast<double>(dense), (1.0 - delta) * c * c, 1e-9);
    }

    // Y = {y : r(y) >= delta |A| / 2 alpha^2}
    std::vector<Residue> y_elems;
    for (Residue y : r.support()) {
        if (static_cast<double>(r(y)) >= y_threshold) y_elems.push_back(y);
    }
    const FpSet Y(ctx, std::move(y_elems));
    const auto maskY = Y.mask();
    rep.set_quantity("Y_size", Y.size());
    rep.check_le("eq-schoen-4", static_cast<double>(Y.size()), 20.0 * alpha * alpha * n, 1e-9);

    // N(c) = {b in C : c b^{-1} in Y};  B = {c : |N(c)| >= (1 - sqrt(delta)) |C|}
    const double keep = (1.0 - std::sqrt(delta)) * c;
    std::vector<Residue> b_elems;
    for (Residue u : C) {
        std::size_t nu = 0;
        for (Residue v_inv : c_inv) nu += maskY[ctx.op(u, v_inv)] ? 1 : 0;
        if (static_cast<double>(nu) >= keep) b_elems.push_back(u);
    }
    FpSet B(ctx, std::move(b_elems));
    const double b = static_cast<double>(B.size());
    const FpSet ratio_set = op_set(B, inv_set(B));

    rep.set_quantity("B_size", B.size());
    rep.set_quantity("BBinv_size", ratio_set.size());
    rep.check_true("chain.B_subset_C", B.subset_of(C));
    rep.check_true("chain.C_subset_A", C.subset_of(A));
    rep.check_ge("eq-bgs-1.size", b, n / (4.0 * alpha), 1e-12);
    check_le_log2(rep, "eq-bgs-1.doubling", static_cast<double>(ratio_set.size()),
                  14.0 + 6.0 * std::log2(alpha) + std::log2(std::max(b, 1.0)));

    // Diagnostic: s(ab^{-1}) >= |C|/3 on B.B^{-1}, s = r_{Y.Y^{-1}}.
    const std::uint64_t s_terms = std::uint64_t{Y.size()} * Y.size();
    if (!B.empty() && within_budget(s_terms, kPairLoopTerms)) {
        const RepFn s = ratio_rep_fn(Y);
        std::uint32_t worst = s.max();
        const FpSet b_inv = inv_set(B);
        for (Residue u : B) {
            for (Residue v_inv : b_inv) worst = std::min(worst, s(ctx.op(u, v_inv)));
        }
        rep.set_quantity("min_s_on_BBinv", worst);
        rep.check_ge("eq-schoen-5", static_cast<double>(worst), c / 3.0);
    } else if (!B.empty()) {
        rep.warn("eq-schoen-5 diagnostic skipped: |Y|^2 over budget");
    }

    return BsgCertificate{A,
                          alpha,
                          delta,
                          pivot.x,
                          C,
                          y_threshold,
                          Y.size(),
                          std::move(B),
                          ratio_set.size(),
                          b > 0.0 ? static_cast<double>(ratio_set.size()) / b : 0.0,
                          std::move(rep)};
}

}  // namespace bgklab
