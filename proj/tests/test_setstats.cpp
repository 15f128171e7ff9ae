#include <gtest/gtest.h>

#include <cmath>

#include "bgklab/bgklab.hpp"
#include "oracles.hpp"

using namespace bgklab;

namespace {

std::vector<std::uint64_t> widen(const FpSet& A) { return {A.begin(), A.end()}; }

}  // namespace

TEST(FpSet, CanonicalAndValidated) {
    const PrimeField f(13);
    const GroupCtx mul(f, GroupMode::multiplicative);
    const FpSet A(mul, {9, 3, 1, 3});
    EXPECT_EQ(A.elements(), (std::vector<Residue>{1, 3, 9}));
    EXPECT_THROW(FpSet(mul, {0, 1}), std::domain_error);
    EXPECT_NO_THROW(FpSet(GroupCtx(f, GroupMode::additive), {0, 1}));
}

TEST(RepFn, SpecExamples) {
    const PrimeField f13(13);
    const GroupCtx mul(f13, GroupMode::multiplicative);
    const RepFn one = rep_fn(FpSet(mul, {1}), FpSet(mul, {1}));
    EXPECT_EQ(one(1), 1U);
    EXPECT_EQ(one.total(), 1U);

    const Subgroup H = subgroup_of_order(f13, 4);
    const FpSet Hs(mul, H.elements());
    const RepFn rh = rep_fn(Hs, Hs);
    for (Residue x = 1; x < 13; ++x) EXPECT_EQ(rh(x), H.contains(x) ? 4U : 0U);

    const GroupCtx add5(PrimeField(5), GroupMode::additive);
    const FpSet A(add5, {1, 2});
    const RepFn r = rep_fn(A, A);
    EXPECT_EQ(r.support(), (std::vector<Residue>{2, 3, 4}));
    EXPECT_EQ(r(2), 1U);
    EXPECT_EQ(r(3), 2U);
    EXPECT_EQ(r(4), 1U);
}

TEST(Energy, SpecExamples) {
    const GroupCtx add5(PrimeField(5), GroupMode::additive);
    const FpSet A(add5, {1, 2});
    EXPECT_EQ(energy(A, A), 6U);

    const GroupCtx add(PrimeField(101), GroupMode::additive);
    const FpSet I(add, interval_set(1, 10));
    EXPECT_EQ(energy(I, I), 670U);
    EXPECT_NEAR(normalized_energy(I), 0.670, 1e-15);

    const PrimeField f(13);
    const GroupCtx mul(f, GroupMode::multiplicative);
    for (const auto& H : all_subgroups(f)) {
        const FpSet Hs(mul, H.elements());
        const auto n = static_cast<std::uint64_t>(H.order());
        EXPECT_EQ(energy(Hs, Hs), n * n * n);
        EXPECT_DOUBLE_EQ(normalized_energy(Hs), 1.0);
    }
    EXPECT_DOUBLE_EQ(normalized_energy(FpSet(mul, {1})), 1.0);
}

TEST(Energy, MatchesQuadrupleLoop) {
    for (std::uint64_t p : {37ULL, 101ULL, 257ULL}) {
        const PrimeField f(p);
        for (GroupMode mode : {GroupMode::additive, GroupMode::multiplicative}) {
            const GroupCtx ctx(f, mode);
            for (std::uint64_t s = 0; s < 6; ++s) {
                const std::size_t m = 1 + (s * 7) % 30;
                const FpSet A(ctx, random_set(f, m, s));
                const FpSet B(ctx, random_set(f, 32 - m, s + 100));
                EXPECT_EQ(energy(A, B), oracle::energy(widen(A), widen(B), p, mode == GroupMode::additive));
                EXPECT_EQ(energy(A, A), oracle::energy(widen(A), widen(A), p, mode == GroupMode::additive));
            }
        }
    }
}

TEST(RepFn, InvariantsOnRandomSets) {
    const PrimeField f(257);
    for (GroupMode mode : {GroupMode::additive, GroupMode::multiplicative}) {
        const GroupCtx ctx(f, mode);
        for (std::uint64_t s = 0; s < 10; ++s) {
            const FpSet A(ctx, random_set(f, 5 + s * 11, s));
            const FpSet B(ctx, random_set(f, 60 - s * 3, s + 50));
            const RepFn r = rep_fn(A, B);
            EXPECT_EQ(r.total(), A.size() * B.size());
            std::uint64_t sum = 0;
            for (auto c : r.counts()) {
                EXPECT_LE(c, std::min(A.size(), B.size()));
                sum += c;
            }
            EXPECT_EQ(sum, A.size() * B.size());
            EXPECT_EQ(energy(A, A), energy(A, inv_set(A)));
            const FpSet AB = op_set(A, B);
            EXPECT_GE(AB.size(), std::max(A.size(), B.size()));
            EXPECT_GE(op_set(A, inv_set(A)).size(), A.size());
        }
    }
}

TEST(OpSet, SpecExamples) {
    const GroupCtx add5(PrimeField(5), GroupMode::additive);
    EXPECT_EQ(op_set(FpSet(add5, {1, 2}), FpSet(add5, {1, 2})).elements(), (std::vector<Residue>{2, 3, 4}));

    const PrimeField f(13);
    const GroupCtx mul(f, GroupMode::multiplicative);
    const FpSet G(mul, {1, 2, 4});
    EXPECT_EQ(op_set(G, G).elements(), (std::vector<Residue>{1, 2, 3, 4, 8}));
    for (const auto& H : all_subgroups(f)) {
        const FpSet Hs(mul, H.elements());
        EXPECT_EQ(op_set(Hs, Hs), Hs);
        EXPECT_EQ(inv_set(Hs), Hs);
    }
    EXPECT_EQ(inv_set(FpSet(mul, {2})).elements(), (std::vector<Residue>{7}));
}

TEST(ExpansionStats, SpecExamples) {
    const PrimeField f(101);
    const auto gp = expansion_stats(f, std::vector<Residue>{1, 2, 4, 8});
    EXPECT_EQ(gp.prod_size, 7U);
    EXPECT_EQ(gp.sum_size, 10U);
    EXPECT_NEAR(gp.exponent, std::log(10.0) / std::log(4.0), 1e-12);
    EXPECT_NEAR(gp.exponent, 1.66, 0.005);

    const auto iv = expansion_stats(f, std::vector<Residue>{1, 2, 3, 4});
    EXPECT_EQ(iv.sum_size, 7U);

    const Subgroup H = subgroup_of_order(f, 20);
    EXPECT_EQ(expansion_stats(f, H.elements()).prod_size, 20U);
    EXPECT_THROW(expansion_stats(f, std::vector<Residue>{3}), std::invalid_argument);
}

TEST(GeometricProgression, Elements) {
    const PrimeField f(101);
    EXPECT_EQ(geometric_progression(f, 2, 4), (std::vector<Residue>{1, 2, 4, 8}));
}
