#pragma once

// Term-count budgets for the quadratic and worse operations.
//
// Every guarded operation projects its cost (number of inner-loop terms)
// before running and throws BudgetError when the projection exceeds its
// budget. Defaults are per operation; the BGKLAB_BUDGET environment
// variable, or set_budget_override(), replaces all of them at once.

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bgklab {

class BudgetError : public std::runtime_error {
public:
    BudgetError(std::string_view what, std::uint64_t projected, std::uint64_t budget)
        : std::runtime_error(std::string(what) + ": projected " + std::to_string(projected) +
                             " terms exceeds budget " + std::to_string(budget)),
          projected_(projected),
          budget_(budget) {}

    std::uint64_t projected() const noexcept { return projected_; }
    std::uint64_t budget() const noexcept { return budget_; }

private:
    std::uint64_t projected_;
    std::uint64_t budget_;
};

namespace detail {

inline std::atomic<std::uint64_t>& budget_override_slot() {
    static std::atomic<std::uint64_t> slot{[] {
        const char* env = std::getenv("BGKLAB_BUDGET");
        if (env == nullptr || *env == '\0') return std::uint64_t{0};
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        return (end != nullptr && *end == '\0' && v > 0) ? std::uint64_t{v} : std::uint64_t{0};
    }()};
    return slot;
}

}  // namespace detail

/// Zero clears the override.
inline void set_budget_override(std::uint64_t terms) {
    detail::budget_override_slot().store(terms, std::memory_order_relaxed);
}

inline std::optional<std::uint64_t> budget_override() {
    std::uint64_t v = detail::budget_override_slot().load(std::memory_order_relaxed);
    if (v == 0) return std::nullopt;
    return v;
}

inline std::uint64_t effective_budget(std::uint64_t default_terms) {
    return budget_override().value_or(default_terms);
}

inline bool within_budget(std::uint64_t projected, std::uint64_t default_terms) {
    return projected <= effective_budget(default_terms);
}

inline void charge(std::string_view what, std::uint64_t projected, std::uint64_t default_terms) {
    const std::uint64_t budget = effective_budget(default_terms);
    if (projected > budget) throw BudgetError(what, projected, budget);
}

// Default budgets.
inline constexpr std::uint64_t kQuadraticExpectationTerms = 400'000'000ULL;  // p <= 20000
inline constexpr std::uint64_t kPivotPairTerms = 1'000'000'000ULL;
inline constexpr std::uint64_t kPairLoopTerms = 1'000'000'000ULL;
inline constexpr std::uint64_t kScanRowTerms = 100'000'000ULL;
inline constexpr std::uint64_t kSearchMaxK = 10'000'000ULL;

}  // namespace bgklab
