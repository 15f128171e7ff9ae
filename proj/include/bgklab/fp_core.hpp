#pragma once

/**
 * @file fp_core.hpp
 * @brief Prime-field arithmetic, multiplicative subgroups and group contexts.
 *
 * Everything in this header is exact integer arithmetic. Residues are kept
 * in [0, p-1]; the modulus is capped at 2^31 - 1 so that every product of
 * two residues fits in an unsigned 64-bit word.
 */

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bgklab {

using Residue = std::uint32_t;

inline constexpr std::uint64_t kMaxModulus = 2147483647ULL;  // 2^31 - 1

// ---------------------------------------------------------------------------
// Number theory helpers
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t mul_mod64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t pow_mod64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1U) result = mul_mod64(result, base, m);
        base = mul_mod64(base, base, m);
        exp >>= 1U;
    }
    return result;
}

}  // namespace detail

/// Deterministic Miller-Rabin; the first twelve primes as witnesses are
/// sufficient for every n < 2^64.
inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    constexpr std::uint64_t witnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (std::uint64_t w : witnesses) {
        if (n % w == 0) return n == w;
    }
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1U) == 0) {
        d >>= 1U;
        ++s;
    }
    for (std::uint64_t w : witnesses) {
        std::uint64_t x = detail::pow_mod64(w, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (unsigned i = 1; i < s; ++i) {
            x = detail::mul_mod64(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

/// Distinct prime factors of n, ascending (trial division).
inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t q = 2; q * q <= n; ++q) {
        if (n % q == 0) {
            out.push_back(q);
            while (n % q == 0) n /= q;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

/// All positive divisors of n, ascending.
inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
    std::vector<std::uint64_t> small, large;
    for (std::uint64_t d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            small.push_back(d);
            if (d != n / d) large.push_back(n / d);
        }
    }
    small.insert(small.end(), large.rbegin(), large.rend());
    return small;
}

/// Primes in the closed range [lo, hi], ascending.
inline std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = std::max<std::uint64_t>(lo, 2); n <= hi; ++n) {
        if (is_prime(n)) out.push_back(n);
    }
    return out;
}

// ---------------------------------------------------------------------------
// PrimeField
// ---------------------------------------------------------------------------

class PrimeField {
public:
    explicit PrimeField(std::uint64_t p) : p_(p) {
        if (p > kMaxModulus) {
            throw std::invalid_argument("PrimeField: modulus exceeds 2^31 - 1");
        }
        if (!is_prime(p)) {
            throw std::invalid_argument("PrimeField: modulus " + std::to_string(p) + " is not prime");
        }
        g_ = find_primitive_root();
    }

    std::uint64_t p() const noexcept { return p_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(p_); }

    /// Smallest generator of F_p^x (1 when p = 2).
    Residue primitive_root() const noexcept { return g_; }

    Residue reduce(std::int64_t x) const noexcept {
        const auto m = static_cast<std::int64_t>(p_);
        x %= m;
        return static_cast<Residue>(x < 0 ? x + m : x);
    }
    Residue add(Residue a, Residue b) const noexcept {
        std::uint64_t s = std::uint64_t{a} + b;
        return static_cast<Residue>(s >= p_ ? s - p_ : s);
    }
    Residue sub(Residue a, Residue b) const noexcept {
        return static_cast<Residue>(a >= b ? a - b : a + p_ - b);
    }
    Residue neg(Residue a) const noexcept { return static_cast<Residue>(a == 0 ? 0 : p_ - a); }
    Residue mul(Residue a, Residue b) const noexcept {
        return static_cast<Residue>(std::uint64_t{a} * b % p_);
    }
    Residue pow(Residue a, std::uint64_t e) const noexcept {
        return static_cast<Residue>(detail::pow_mod64(a, e, p_));
    }
    Residue inv(Residue a) const {
        if (a % p_ == 0) throw std::domain_error("PrimeField::inv: zero has no inverse");
        return pow(a, p_ - 2);
    }

    /// Multiplicative order of a nonzero residue.
    std::uint64_t order(Residue a) const {
        if (a % p_ == 0) throw std::domain_error("PrimeField::order: zero residue");
        std::uint64_t n = p_ - 1;
        for (std::uint64_t q : prime_factors(p_ - 1)) {
            while (n % q == 0 && pow(a, n / q) == 1) n /= q;
        }
        return n;
    }

    friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.p_ == b.p_; }

private:
    Residue find_primitive_root() const {
        if (p_ == 2) return 1;
        const auto factors = prime_factors(p_ - 1);
        for (std::uint64_t g = 2; g < p_; ++g) {
            bool generator = std::all_of(factors.begin(), factors.end(), [&](std::uint64_t q) {
                return detail::pow_mod64(g, (p_ - 1) / q, p_) != 1;
            });
            if (generator) return static_cast<Residue>(g);
        }
        throw std::logic_error("PrimeField: no primitive root found");
    }

    std::uint64_t p_;
    Residue g_ = 1;
};

inline Residue primitive_root(const PrimeField& field) { return field.primitive_root(); }

// ---------------------------------------------------------------------------
// GroupCtx
// ---------------------------------------------------------------------------

enum class GroupMode { additive, multiplicative };

inline const char* to_string(GroupMode mode) {
    return mode == GroupMode::additive ? "additive" : "multiplicative";
}

/// F_p seen either as (F_p, +) or as (F_p^x, *).
class GroupCtx {
public:
    GroupCtx(PrimeField field, GroupMode mode) : field_(std::move(field)), mode_(mode) {}

    const PrimeField& field() const noexcept { return field_; }
    GroupMode mode() const noexcept { return mode_; }
    bool additive() const noexcept { return mode_ == GroupMode::additive; }
    std::uint64_t p() const noexcept { return field_.p(); }

    Residue identity() const noexcept { return additive() ? 0 : 1; }
    std::uint64_t order() const noexcept { return additive() ? field_.p() : field_.p() - 1; }

    bool in_carrier(std::uint64_t a) const noexcept {
        return a < field_.p() && (additive() || a != 0);
    }

    Residue op(Residue a, Residue b) const {
        check(a);
        check(b);
        return additive() ? field_.add(a, b) : field_.mul(a, b);
    }
    Residue inv(Residue a) const {
        check(a);
        return additive() ? field_.neg(a) : field_.inv(a);
    }
    /// a * b^{-1} (a - b additively).
    Residue quotient(Residue a, Residue b) const { return op(a, inv(b)); }

    friend bool operator==(const GroupCtx& a, const GroupCtx& b) {
        return a.field_ == b.field_ && a.mode_ == b.mode_;
    }

private:
    void check(std::uint64_t a) const {
        if (!in_carrier(a)) {
            throw std::domain_error(std::string("GroupCtx: residue ") + std::to_string(a) +
                                    " is not in the " + to_string(mode_) + " carrier");
        }
    }

    PrimeField field_;
    GroupMode mode_;
};

inline Residue group_op(const GroupCtx& ctx, Residue a, Residue b) { return ctx.op(a, b); }
inline Residue group_inv(const GroupCtx& ctx, Residue a) { return ctx.inv(a); }

// ---------------------------------------------------------------------------
// Subgroup
// ---------------------------------------------------------------------------

/// A subgroup H of F_p^x, stored as its sorted element list.
class Subgroup {
public:
    const PrimeField& field() const noexcept { return field_; }
    std::uint64_t p() const noexcept { return field_.p(); }
    std::size_t order() const noexcept { return elements_.size(); }
    /// d = (p-1)/|H|; H is the set of d-th powers.
    std::uint64_t index() const noexcept { return (field_.p() - 1) / elements_.size(); }
    const std::vector<Residue>& elements() const noexcept { return elements_; }
    Residue generator() const noexcept { return generator_; }

    bool contains(Residue x) const {
        return std::binary_search(elements_.begin(), elements_.end(), x);
    }

    friend Subgroup subgroup_of_order(const PrimeField& field, std::uint64_t n);

private:
    Subgroup(PrimeField field, std::vector<Residue> elements, Residue generator)
        : field_(std::move(field)), elements_(std::move(elements)), generator_(generator) {}

    PrimeField field_;
    std::vector<Residue> elements_;
    Residue generator_;
};

/// The unique subgroup of order n of F_p^x: {g^(k(p-1)/n)}.
inline Subgroup subgroup_of_order(const PrimeField& field, std::uint64_t n) {
    const std::uint64_t group_order = field.p() - 1;
    if (n == 0 || group_order % n != 0) {
        throw std::invalid_argument("subgroup_of_order: " + std::to_string(n) +
                                    " does not divide p - 1 = " + std::to_string(group_order));
    }
    const Residue gen = field.pow(field.primitive_root(), group_order / n);
    std::vector<Residue> elements;
    elements.reserve(n);
    Residue x = 1;
    for (std::uint64_t k = 0; k < n; ++k) {
        elements.push_back(x);
        x = field.mul(x, gen);
    }
    std::sort(elements.begin(), elements.end());
    return Subgroup(field, std::move(elements), gen);
}

/// One subgroup per divisor of p - 1, ascending by order.
inline std::vector<Subgroup> all_subgroups(const PrimeField& field) {
    std::vector<Subgroup> out;
    for (std::uint64_t n : divisors(field.p() - 1)) out.push_back(subgroup_of_order(field, n));
    return out;
}

/// Coset representatives of H in F_p^x: the smallest element of each coset,
/// ascending. There are (p-1)/|H| of them.
inline std::vector<Residue> cosets(const Subgroup& sub) {
    const auto& field = sub.field();
    std::vector<char> seen(field.size(), 0);
    std::vector<Residue> reps;
    reps.reserve(sub.index());
    for (std::uint64_t a = 1; a < field.p(); ++a) {
        if (seen[a]) continue;
        reps.push_back(static_cast<Residue>(a));
        for (Residue h : sub.elements()) seen[field.mul(static_cast<Residue>(a), h)] = 1;
    }
    return reps;
}

}  // namespace bgklab
