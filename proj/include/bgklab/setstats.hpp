#pragma once

// Exact counting for finite subsets of a group context: representation
// functions, energies, sumsets / product sets and sum-product measurements.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "bgklab/budget.hpp"
#include "bgklab/fp_core.hpp"

namespace bgklab {

/// Sorted, duplicate-free subset of a GroupCtx carrier.
class FpSet {
public:
    FpSet(GroupCtx ctx, std::vector<Residue> elements)
        : ctx_(std::move(ctx)), elements_(std::move(elements)) {
        std::sort(elements_.begin(), elements_.end());
        elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
        for (Residue x : elements_) {
            if (!ctx_.in_carrier(x)) {
                throw std::domain_error("FpSet: residue " + std::to_string(x) + " not in the " +
                                        to_string(ctx_.mode()) + " carrier");
            }
        }
    }

    const GroupCtx& ctx() const noexcept { return ctx_; }
    std::size_t size() const noexcept { return elements_.size(); }
    bool empty() const noexcept { return elements_.empty(); }
    const std::vector<Residue>& elements() const noexcept { return elements_; }
    auto begin() const noexcept { return elements_.begin(); }
    auto end() const noexcept { return elements_.end(); }

    bool contains(Residue x) const {
        return std::binary_search(elements_.begin(), elements_.end(), x);
    }

    /// Dense membership table of length p.
    std::vector<char> mask() const {
        std::vector<char> m(ctx_.field().size(), 0);
        for (Residue x : elements_) m[x] = 1;
        return m;
    }

    bool subset_of(const FpSet& other) const {
        return std::includes(other.begin(), other.end(), begin(), end());
    }

    friend bool operator==(const FpSet& a, const FpSet& b) {
        return a.ctx_ == b.ctx_ && a.elements_ == b.elements_;
    }

private:
    GroupCtx ctx_;
    std::vector<Residue> elements_;
};

inline void require_same_ctx(const FpSet& a, const FpSet& b, const char* what) {
    if (!(a.ctx() == b.ctx())) throw std::invalid_argument(std::string(what) + ": context mismatch");
}

/// r_{A.B}(x) = #{(a, b) in A x B : ab = x}, stored densely over F_p.
class RepFn {
public:
    RepFn(GroupCtx ctx, std::vector<std::uint32_t> counts, std::uint64_t total)
        : ctx_(std::move(ctx)), counts_(std::move(counts)), total_(total) {
        for (std::size_t x = 0; x < counts_.size(); ++x) {
            if (counts_[x] > 0) support_.push_back(static_cast<Residue>(x));
        }
    }

    const GroupCtx& ctx() const noexcept { return ctx_; }
    std::uint32_t operator()(Residue x) const { return counts_.at(x); }
    std::span<const std::uint32_t> counts() const noexcept { return counts_; }
    /// Residues with r > 0, ascending.
    const std::vector<Residue>& support() const noexcept { return support_; }
    /// sum_x r(x) = |A||B|.
    std::uint64_t total() const noexcept { return total_; }
    std::uint32_t max() const {
        return counts_.empty() ? 0 : *std::max_element(counts_.begin(), counts_.end());
    }

    /// sum_x r(x)^2
    std::uint64_t second_moment() const {
        std::uint64_t e = 0;
        for (Residue x : support_) e += std::uint64_t{counts_[x]} * counts_[x];
        return e;
    }

    /// r as doubles, for expectations E(r(X)).
    std::vector<double> as_reals() const { return {counts_.begin(), counts_.end()}; }

private:
    GroupCtx ctx_;
    std::vector<std::uint32_t> counts_;
    std::vector<Residue> support_;
    std::uint64_t total_;
};

inline RepFn rep_fn(const FpSet& A, const FpSet& B) {
    require_same_ctx(A, B, "rep_fn");
    const auto& ctx = A.ctx();
    charge("rep_fn", std::uint64_t{A.size()} * B.size(), kPairLoopTerms);
    std::vector<std::uint32_t> counts(ctx.field().size(), 0);
    for (Residue a : A) {
        for (Residue b : B) ++counts[ctx.op(a, b)];
    }
    return RepFn(ctx, std::move(counts), std::uint64_t{A.size()} * B.size());
}

inline FpSet inv_set(const FpSet& A) {
    std::vector<Residue> out;
    out.reserve(A.size());
    for (Residue a : A) out.push_back(A.ctx().inv(a));
    return FpSet(A.ctx(), std::move(out));
}

/// Representation function of A.A^{-1} (A - A additively).
inline RepFn ratio_rep_fn(const FpSet& A) { return rep_fn(A, inv_set(A)); }

/// E(A, B) = sum_x r_{A.B}(x)^2.
inline std::uint64_t energy(const FpSet& A, const FpSet& B) { return rep_fn(A, B).second_moment(); }

/// e(A) = E(A, A) / |A|^3, in (0, 1].
inline double normalized_energy(const FpSet& A) {
    if (A.empty()) throw std::invalid_argument("normalized_energy: empty set");
    const double n = static_cast<double>(A.size());
    return static_cast<double>(energy(A, A)) / (n * n * n);
}

/// A.B (or A + B).
inline FpSet op_set(const FpSet& A, const FpSet& B) {
    require_same_ctx(A, B, "op_set");
    const auto& ctx = A.ctx();
    charge("op_set", std::uint64_t{A.size()} * B.size(), kPairLoopTerms);
    std::vector<char> hit(ctx.field().size(), 0);
    for (Residue a : A) {
        for (Residue b : B) hit[ctx.op(a, b)] = 1;
    }
    std::vector<Residue> out;
    for (std::size_t x = 0; x < hit.size(); ++x) {
        if (hit[x]) out.push_back(static_cast<Residue>(x));
    }
    return FpSet(ctx, std::move(out));
}

struct ExpansionStats {
    std::size_t set_size;
    std::size_t sum_size;
    std::size_t prod_size;
    double exponent;  // log max(|A+A|, |A.A|) / log |A|
};

/// Sum-product growth of A subset of F_p^x. Report-only.
inline ExpansionStats expansion_stats(const PrimeField& field, std::span<const Residue> elements) {
    const FpSet additive(GroupCtx(field, GroupMode::additive), {elements.begin(), elements.end()});
    if (additive.size() < 2) throw std::invalid_argument("expansion_stats: need |A| >= 2");
    const FpSet multiplicative(GroupCtx(field, GroupMode::multiplicative),
                               {elements.begin(), elements.end()});
    const auto sums = op_set(additive, additive).size();
    const auto prods = op_set(multiplicative, multiplicative).size();
    const double n = static_cast<double>(additive.size());
    return {additive.size(), sums, prods,
            std::log(static_cast<double>(std::max(sums, prods))) / std::log(n)};
}

}  // namespace bgklab
