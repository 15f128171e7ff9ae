#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "bgklab/bgklab.hpp"
#include "oracles.hpp"

using namespace bgklab;

namespace {

/// Recounts eq-schoen-1 and eq-schoen-2 for a pivot from scratch.
void expect_pivot_consequences(const FpSet& A, const Pivot& pv, double alpha, double delta) {
    const auto& ctx = A.ctx();
    const double n = static_cast<double>(A.size());
    const double c = static_cast<double>(pv.C.size());
    EXPECT_GE(c, n / (2 * alpha) - 1e-12);
    std::vector<std::uint64_t> r(ctx.p(), 0);
    for (Residue a : A)
        for (Residue b : A) ++r[ctx.op(a, ctx.inv(b))];
    std::uint64_t dense = 0;
    for (Residue a : pv.C)
        for (Residue b : pv.C)
            if (static_cast<double>(r[ctx.op(a, ctx.inv(b))]) >= delta * n / (2 * alpha * alpha)) ++dense;
    EXPECT_GE(static_cast<double>(dense), (1 - delta) * c * c - 1e-9);
    for (Residue a : pv.C) {
        EXPECT_TRUE(A.contains(a));
        EXPECT_TRUE(A.contains(ctx.op(a, ctx.inv(pv.x))));
    }
}

}  // namespace

TEST(FindPivot, SubgroupTakesIdentity) {
    const PrimeField f(13);
    const GroupCtx mul(f, GroupMode::multiplicative);
    for (const auto& H : all_subgroups(f)) {
        const FpSet A(mul, H.elements());
        const Pivot pv = find_pivot(A, 1.0, 0.1);
        EXPECT_EQ(pv.x, 1U);
        EXPECT_EQ(pv.C, A);
        EXPECT_GE(pv.score, static_cast<double>(A.size() * A.size()) / 2.0);
    }
}

TEST(FindPivot, IntervalMatchesExhaustiveScores) {
    const GroupCtx add(PrimeField(101), GroupMode::additive);
    const FpSet A(add, interval_set(1, 10));
    const double alpha = 1.0 / 0.670;
    const Pivot pv = find_pivot(A, alpha, 0.1);
    EXPECT_GE(pv.C.size(), 4U);
    const auto scores = oracle::pivot_scores({A.begin(), A.end()}, 101, true, alpha, 0.1);
    const auto it = std::find_if(scores.begin(), scores.end(), [&](const auto& s) { return s.first == pv.x; });
    ASSERT_NE(it, scores.end());
    EXPECT_NEAR(it->second, pv.score, 1e-9);
    EXPECT_GE(pv.score, 100.0 / (2 * alpha * alpha) * (1 - 1e-12));
    expect_pivot_consequences(A, pv, alpha, 0.1);
}

TEST(FindPivot, RandomSubsetOf257) {
    const PrimeField f(257);
    const GroupCtx mul(f, GroupMode::multiplicative);
    const FpSet A(mul, random_set(f, 64, 5));
    ASSERT_EQ(A.size(), 64U);
    const double alpha = 1.0 / normalized_energy(A);
    const Pivot pv = find_pivot(A, alpha, 0.1);
    expect_pivot_consequences(A, pv, alpha, 0.1);
    // The oracle's scores confirm the pivot is the first admissible in descending-r order.
    const auto scores = oracle::pivot_scores({A.begin(), A.end()}, 257, false, alpha, 0.1);
    const auto it = std::find_if(scores.begin(), scores.end(), [&](const auto& s) { return s.first == pv.x; });
    ASSERT_NE(it, scores.end());
    EXPECT_NEAR(it->second, pv.score, 1e-9);
}

TEST(FindPivot, RejectsBadParameters) {
    const GroupCtx add(PrimeField(101), GroupMode::additive);
    const FpSet A(add, interval_set(1, 10));
    EXPECT_THROW(find_pivot(A, 0.5, 0.1), std::invalid_argument);
    EXPECT_THROW(find_pivot(A, 2.0, 0.0), std::invalid_argument);
    EXPECT_THROW(find_pivot(A, 1.0, 0.1), std::invalid_argument);  // e(A) = 0.67 < 1/alpha
    EXPECT_THROW(find_pivot(FpSet(add, {}), 2.0, 0.1), std::invalid_argument);
}

TEST(Bsg, SpecExamples) {
    const PrimeField f(13);
    const GroupCtx mul(f, GroupMode::multiplicative);
    const FpSet H(mul, subgroup_of_order(f, 12).elements());
    const BsgCertificate c = bsg(H);
    EXPECT_TRUE(c.pass());
    EXPECT_GE(c.B.size(), 3U);
    EXPECT_TRUE(op_set(c.B, inv_set(c.B)).subset_of(H));
    EXPECT_LE(c.ratio, 4.0);

    const GroupCtx add(PrimeField(101), GroupMode::additive);
    const BsgCertificate ci = bsg(FpSet(add, interval_set(1, 10)));
    EXPECT_TRUE(ci.pass());
    EXPECT_GE(static_cast<double>(ci.B.size()), 10.0 / (4.0 * ci.alpha));

    const BsgCertificate one = bsg(FpSet(mul, {1}));
    EXPECT_EQ(one.B.elements(), (std::vector<Residue>{1}));
    EXPECT_DOUBLE_EQ(one.ratio, 1.0);
}

TEST(Bsg, CertificateRecount) {
    const PrimeField f(257);
    for (GroupMode mode : {GroupMode::additive, GroupMode::multiplicative}) {
        const GroupCtx ctx(f, mode);
        for (std::uint64_t s = 0; s < 4; ++s) {
            const FpSet A(ctx, random_set(f, 20 + 30 * s, s));
            const BsgCertificate c = bsg(A);
            ASSERT_TRUE(c.pass()) << s;
            EXPECT_TRUE(c.B.subset_of(c.C));
            EXPECT_TRUE(c.C.subset_of(A));
            std::set<Residue> ratio;
            for (Residue a : c.B)
                for (Residue b : c.B) ratio.insert(ctx.op(a, ctx.inv(b)));
            EXPECT_EQ(ratio.size(), c.ratio_set_size);
            EXPECT_GE(static_cast<double>(c.B.size()), static_cast<double>(A.size()) / (4 * c.alpha));
            EXPECT_LE(static_cast<double>(ratio.size()),
                      std::exp2(14.0) * std::pow(c.alpha, 6.0) * static_cast<double>(c.B.size()));
        }
    }
}

TEST(Bsg, LargerAlphaKeepsWeakerCertificate) {
    const GroupCtx add(PrimeField(101), GroupMode::additive);
    const FpSet A(add, interval_set(1, 20));
    const double a0 = 1.0 / normalized_energy(A);
    for (double scale : {1.0, 1.5, 3.0, 10.0}) {
        const BsgCertificate c = bsg(A, a0 * scale);
        EXPECT_TRUE(c.pass()) << scale;
    }
    EXPECT_THROW(bsg(A, 1.0), std::invalid_argument);
}

TEST(Bsg, CorpusShape) {
    const auto corpus = bsg_corpus(0);
    EXPECT_EQ(corpus.size(), 200U);
    std::size_t additive = 0;
    for (const auto& c : corpus) {
        EXPECT_LE(c.set.size(), 512U);
        EXPECT_FALSE(c.set.empty());
        additive += c.set.ctx().additive();
    }
    EXPECT_GT(additive, 0U);
    EXPECT_LT(additive, corpus.size());
}
