#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "bgklab/bgklab.hpp"
#include "oracles.hpp"

using namespace bgklab;

namespace {

Complex to_c(std::complex<long double> z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

const Assertion* find_row(const Report& r, const std::string& name) {
    for (const auto& a : r.assertions())
        if (a.name == name) return &a;
    return nullptr;
}

}  // namespace

TEST(SubgroupCharSum, SpecExamples) {
    for (std::uint64_t p : {13ULL, 101ULL}) {
        const PrimeField f(p);
        const Subgroup units = subgroup_of_order(f, p - 1);
        for (Residue a = 1; a < p; ++a)
            EXPECT_NEAR(std::abs(subgroup_char_sum(units, a) - Complex(-1.0 / static_cast<double>(p - 1), 0)), 0.0,
                        1e-12);
        for (const auto& H : all_subgroups(f)) EXPECT_EQ(subgroup_char_sum(H, 0), Complex(1, 0));
    }
    const Subgroup sq = subgroup_of_order(PrimeField(13), 6);
    const Complex v = subgroup_char_sum(sq, 1);
    EXPECT_NEAR(v.real(), (std::sqrt(13.0) - 1.0) / 12.0, 1e-12);
    EXPECT_NEAR(v.real(), 0.21713, 1e-5);
    EXPECT_NEAR(v.imag(), 0.0, 1e-12);
}

TEST(SubgroupFourier, MatchesDirectSumsAndCosetInvariance) {
    for (std::uint64_t p : {13ULL, 101ULL, 157ULL}) {
        const PrimeField f(p);
        for (const auto& H : all_subgroups(f)) {
            const SubgroupFourier F(H);
            const auto Ho = oracle::subgroup(p, H.order());
            double parseval = 0;
            for (Residue a = 0; a < p; ++a) {
                const Complex ref = to_c(oracle::subgroup_sum(Ho, a, p)) / static_cast<double>(H.order());
                EXPECT_LE(std::abs(F(a) - ref), 1e-9);
                parseval += std::norm(F(a));
                for (Residue h : H.elements()) EXPECT_LE(std::abs(F(f.mul(a, h)) - F(a)), 1e-9);
            }
            EXPECT_NEAR(parseval, static_cast<double>(p) / static_cast<double>(H.order()), 1e-9 * p);
        }
    }
}

TEST(GaussSum, SpecExamples) {
    const PrimeField f(13);
    for (Residue a = 1; a < 13; ++a) EXPECT_LE(std::abs(gauss_sum(f, 1, a)), 1e-9);
    const Complex g2 = gauss_sum(f, 2, 1);
    EXPECT_NEAR(g2.real(), std::sqrt(13.0), 1e-9);
    EXPECT_NEAR(g2.imag(), 0.0, 1e-9);
    const auto forms = gauss_sum_forms(f, 3, 1);
    EXPECT_LE(forms.discrepancy, 1e-9);
    EXPECT_THROW(gauss_sum(f, 5, 1), std::invalid_argument);
    EXPECT_THROW(gauss_sum(f, 2, 0), std::invalid_argument);
}

TEST(GaussSum, QuadraticModulusAndIdentity) {
    for (std::uint64_t p : primes_in(3, 200)) {
        const PrimeField f(p);
        const GaussSumTable t2(f, 2);
        for (Residue a = 1; a < p; ++a) {
            const auto forms = t2.forms(a);
            EXPECT_NEAR(std::abs(forms.direct), std::sqrt(static_cast<double>(p)), 1e-6);
            EXPECT_LE(forms.discrepancy, 1e-9);
        }
        // Direct-sum oracle for d = 3 or 4 where available.
        for (std::uint64_t d : {3ULL, 4ULL}) {
            if ((p - 1) % d != 0) continue;
            const GaussSumTable t(f, d);
            for (Residue a = 1; a < p; a += 7) {
                std::complex<long double> ref = 0;
                std::set<std::uint64_t> single;
                for (std::uint64_t x = 0; x < p; ++x) {
                    single = {oracle::powmod(x, d, p)};
                    ref += oracle::subgroup_sum(single, a, p);
                }
                EXPECT_LE(std::abs(t.forms(a).direct - to_c(ref)), 1e-9);
            }
        }
    }
}

TEST(WalkCharFn, SpecExamples) {
    const PrimeField f(13);
    const auto units = subgroup_of_order(f, 12);
    const CharFn phi1 = walk_char_fn(WalkSpec(units, 1));
    EXPECT_NEAR(phi1(0).real(), 1.0, 1e-15);
    for (Residue a = 1; a < 13; ++a) EXPECT_NEAR(phi1(a).real(), 1.0 / 144.0, 1e-15);

    const auto H = subgroup_of_order(f, 3);
    const CharFn phi2 = walk_char_fn(WalkSpec(H, 2));
    EXPECT_NEAR(phi2(1).real(), std::pow(std::abs(subgroup_char_sum(H, 1)), 4.0), 1e-15);
    for (std::uint64_t k : {1ULL, 7ULL, 40ULL}) EXPECT_DOUBLE_EQ(walk_char_fn(WalkSpec(H, k))(0).real(), 1.0);
    EXPECT_THROW(WalkSpec(H, 0), std::invalid_argument);
}

TEST(WalkDistribution, MatchesRepeatedConvolution) {
    for (std::uint64_t p : {13ULL, 31ULL, 101ULL}) {
        const PrimeField f(p);
        for (const auto& H : all_subgroups(f)) {
            for (std::uint64_t k : {1ULL, 2ULL, 5ULL}) {
                const DistFp X = walk_distribution(WalkSpec(H, k));
                const auto ref = oracle::walk_density(p, H.order(), k);
                for (Residue x = 0; x < p; ++x) ASSERT_NEAR(X(x), ref[x], 1e-12) << p << " " << H.order() << " " << k;
                // phi_{X_k} = |phi_S|^{2k} against the direct char_fn of the density.
                const auto phi = char_fn(X).values();
                const CharFn w = walk_char_fn(WalkSpec(H, k));
                for (Residue a = 0; a < p; ++a) EXPECT_LE(std::abs(phi[a] - w(a)), 1e-9);
            }
        }
    }
}

TEST(WalkMass, LogDomainAgreesWithDirect) {
    const PrimeField f(101);
    for (const auto& H : all_subgroups(f)) {
        const SubgroupFourier F(H);
        for (std::uint64_t k : {1ULL, 10ULL, 31ULL, 200ULL}) {
            double direct = 0;
            for (Residue a = 0; a < 101; ++a) direct += std::pow(F.modulus(a), 4.0 * static_cast<double>(k));
            EXPECT_NEAR(walk_mass(F, k), direct, 1e-9 * direct);
        }
    }
}

TEST(Spectrum, SpecExamples) {
    const PrimeField f(13);
    const auto units = subgroup_of_order(f, 12);
    for (double nu : {0.5, 1.0, 2.0}) {
        const Spectrum s = spectrum(units, nu);
        const bool full = 1.0 / 12.0 > std::pow(13.0, -nu);
        EXPECT_EQ(s.size(), full ? 13U : 1U) << nu;
        EXPECT_TRUE(s.contains(0));
    }
    const Spectrum one = spectrum(subgroup_of_order(f, 1), 0.2);
    EXPECT_EQ(one.size(), 13U);

    const auto sq = subgroup_of_order(f, 6);
    const Spectrum s = spectrum(sq, 0.3);
    std::set<Residue> expect{0};
    for (Residue a = 1; a < 13; ++a)
        if (std::abs(oracle::subgroup_sum(oracle::subgroup(13, 6), a, 13)) / 6.0L > std::pow(13.0L, -0.3L))
            expect.insert(a);
    EXPECT_EQ(std::set<Residue>(s.members.begin(), s.members.end()), expect);
    EXPECT_THROW(spectrum(sq, 0.0), std::invalid_argument);
}

TEST(Spectrum, InvariantsAndMonotone) {
    for (std::uint64_t p : {101ULL, 157ULL, 257ULL}) {
        const PrimeField f(p);
        for (const auto& H : all_subgroups(f)) {
            const SubgroupFourier F(H);
            std::vector<Residue> prev;
            for (double nu : {0.05, 0.1, 0.25, 0.5, 1.0}) {
                const Spectrum s = spectrum(F, nu);
                EXPECT_TRUE(s.contains(0));
                // Nonzero members form a union of cosets.
                for (Residue a : s.members) {
                    if (a == 0) continue;
                    for (Residue h : H.elements()) EXPECT_TRUE(s.contains(f.mul(a, h)));
                }
                const double pd = static_cast<double>(p);
                EXPECT_LE(static_cast<double>(s.size()), std::pow(pd, 1 + 2 * nu) / H.order() + 1 + 1e-9);
                for (Residue a : prev) EXPECT_TRUE(s.contains(a));
                prev = s.members;
            }
        }
    }
}

TEST(Search, UnitsSucceedAtFour) {
    for (std::uint64_t p : {13ULL, 101ULL}) {
        const SearchResult r = search_k_nu(subgroup_of_order(PrimeField(p), p - 1), 0.3);
        EXPECT_EQ(r.k, 4U);
        EXPECT_EQ(r.iterations.size(), 1U);
        EXPECT_TRUE(r.pass());
    }
}

TEST(Search, OrderOf156In157) {
    const SearchResult r = search_k_nu(subgroup_of_order(PrimeField(157), 156), 0.5);
    EXPECT_TRUE(r.pass());
    ASSERT_NE(find_row(r.report, "eq-m-bound.lower"), nullptr);
    ASSERT_NE(find_row(r.report, "eq-m-bound.upper"), nullptr);
    EXPECT_LE(4.0 * static_cast<double>(r.k) * r.nu, 0.5 + 1e-12);
}

TEST(Search, TraceFollowsStepRule) {
    // Small subgroups force at least one failed test; each step is ceil(k^2/theta).
    const PrimeField f(1009);
    for (std::uint64_t n : {36ULL, 56ULL, 84ULL}) {
        const double theta = 0.3;
        const SearchResult r = search_k_nu(subgroup_of_order(f, n), theta);
        EXPECT_TRUE(r.pass()) << n;
        std::uint64_t k = 4;
        for (std::size_t i = 0; i < r.iterations.size(); ++i) {
            EXPECT_EQ(r.iterations[i]["k"].get<std::uint64_t>(), k);
            const auto kd = static_cast<double>(k);
            k = static_cast<std::uint64_t>(std::ceil(kd * kd / theta));
        }
    }
}

TEST(Search, BudgetStopsLongRuns) {
    set_budget_override(3);
    EXPECT_THROW(search_k_nu(subgroup_of_order(PrimeField(101), 100), 0.5), BudgetError);
    set_budget_override(0);
    EXPECT_THROW(search_k_nu(subgroup_of_order(PrimeField(101), 100), 1.0), std::invalid_argument);
}

TEST(Expansion, SpecExamples) {
    const PrimeField f(13);
    const Report r0 = verify_expansion_inequality(WalkSpec(subgroup_of_order(f, 3), 1), 0);
    EXPECT_TRUE(r0.pass());
    EXPECT_NEAR(r0.quantities().at("lhs").get<double>(), 1.0, 1e-12);
    for (Residue a = 1; a < 13; ++a) {
        EXPECT_TRUE(verify_expansion_inequality(WalkSpec(subgroup_of_order(f, 12), 2), a).pass());
    }
    EXPECT_TRUE(verify_expansion_inequality(WalkSpec(subgroup_of_order(f, 3), 1), 1).pass());
}

TEST(Expansion, AllSubgroupsSmallPrimes) {
    for (std::uint64_t p : {13ULL, 101ULL}) {
        const PrimeField f(p);
        for (const auto& H : all_subgroups(f)) {
            for (std::uint64_t k : {1ULL, 2ULL, 3ULL}) {
                const ExpansionCheck chk(WalkSpec(H, k));
                for (Residue a = 0; a < p; ++a) ASSERT_TRUE(chk.check(a).pass()) << p << " " << H.order() << " " << k;
            }
        }
    }
    EXPECT_THROW(ExpansionCheck(WalkSpec(subgroup_of_order(PrimeField(20011), 2), 1)), std::invalid_argument);
}

TEST(Scan, SpecExamples) {
    const auto r13 = theorem_scan(13, 13, 0.5);
    ASSERT_EQ(r13.size(), 3U);
    EXPECT_EQ(r13[0].subgroup_order, 4U);
    EXPECT_EQ(r13[1].subgroup_order, 6U);
    EXPECT_EQ(r13[2].subgroup_order, 12U);
    EXPECT_NEAR(r13[1].max_abs_sum, (std::sqrt(13.0) + 1) / 2, 1e-9);
    EXPECT_NEAR(r13[1].max_abs_sum, 2.30278, 1e-5);
    EXPECT_NEAR(r13[2].max_abs_sum, 1.0, 1e-9);
    EXPECT_NEAR(r13[2].normalized, 1.0 / 12.0, 1e-9);

    const auto r3 = theorem_scan(3, 3, 0.5);
    ASSERT_EQ(r3.size(), 1U);
    EXPECT_EQ(r3[0].subgroup_order, 2U);

    // gamma > 0 excludes H = {1}; the all-subgroups scan keeps it.
    EXPECT_TRUE(theorem_scan(2, 2, 0.5).empty());
    const auto r2 = all_subgroups_scan(2, 2);
    ASSERT_EQ(r2.size(), 1U);
    EXPECT_EQ(r2[0].subgroup_order, 1U);
    EXPECT_NEAR(r2[0].max_abs_sum, 1.0, 1e-12);
    EXPECT_THROW(theorem_scan(13, 13, 1.5), std::invalid_argument);
}

TEST(Scan, MatchesExhaustiveOracle) {
    for (const auto& row : all_subgroups_scan(2, 211)) {
        EXPECT_NEAR(row.max_abs_sum, static_cast<double>(oracle::scan_max(row.p, row.subgroup_order)), 1e-9)
            << row.p << " " << row.subgroup_order;
        EXPECT_TRUE(row.sqrt_p_ok);
    }
}

TEST(Scan, CsvFormat) {
    const std::string csv = scan_csv(theorem_scan(13, 13, 0.5));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "p,subgroup_order,max_abs_sum,normalized,sqrt_p_ok");
    EXPECT_NE(csv.find("13,6,2.30277563773,0.383795939622,true\n"), std::string::npos) << csv;
    EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST(Chain, SpecExamples) {
    const PrimeField f(157);
    const Report r = final_chain_report(subgroup_of_order(f, 156), 0.9, 0.05, 0.1);
    EXPECT_TRUE(r.pass());
    ASSERT_NE(find_row(r, "eq-last-bound"), nullptr);
    EXPECT_THROW(final_chain_report(subgroup_of_order(f, 156), 0.5, 0.05, 0.1), std::invalid_argument);
    EXPECT_THROW(final_chain_report(subgroup_of_order(f, 12), 0.9, 0.05, 0.1), std::invalid_argument);

    const PrimeField g(101);
    const Report u = final_chain_report(subgroup_of_order(g, 100), 0.99, 0.05, 0.1);
    EXPECT_TRUE(u.pass());
}

TEST(Chain, LastBoundAcrossSubgroups) {
    for (std::uint64_t p : {157ULL, 1009ULL}) {
        const PrimeField f(p);
        for (const auto& H : all_subgroups(f)) {
            if (static_cast<double>(H.order()) < std::sqrt(static_cast<double>(p))) continue;
            const SubgroupFourier F(H);
            for (double theta : {0.3, 0.5}) {
                const SearchResult s = search_k_nu(F, theta);
                ASSERT_TRUE(s.pass()) << p << " " << H.order() << " " << theta;
                const Report c = check_last_bound(F, s);
                EXPECT_TRUE(c.pass()) << p << " " << H.order() << " " << theta;
                EXPECT_NE(find_row(c, "eq-last-bound"), nullptr);
            }
        }
    }
}
