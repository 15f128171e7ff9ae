#include <gtest/gtest.h>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "bgklab/bgklab.hpp"

using namespace bgklab;

TEST(Config, ParsesKeyValueLines) {
    const auto kv = parse_config_text("# comment\n\np = 101\n  interval=1..10  \nmode = additive\r\n");
    ASSERT_EQ(kv.size(), 3U);
    EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"p", "101"}));
    EXPECT_EQ(kv[1], (std::pair<std::string, std::string>{"interval", "1..10"}));
    EXPECT_EQ(kv[2], (std::pair<std::string, std::string>{"mode", "additive"}));
}

TEST(Config, RejectsMalformedLines) {
    EXPECT_THROW(parse_config_text("p 101\n"), ConfigError);
    EXPECT_THROW(parse_config_text(" = 3\n"), ConfigError);
    EXPECT_THROW(parse_config_text("bad key = 3\n"), ConfigError);
    EXPECT_THROW(load_config_file("/nonexistent/file.cfg"), ConfigError);
}

TEST(SetInputs, InlineRangeAndFile) {
    EXPECT_EQ(parse_set_inline("1,3,9"), (std::vector<Residue>{1, 3, 9}));
    EXPECT_EQ(parse_set_inline(" 4 5,6 "), (std::vector<Residue>{4, 5, 6}));
    EXPECT_THROW(parse_set_inline("1,x"), ConfigError);
    EXPECT_THROW(parse_set_inline(""), ConfigError);
    EXPECT_EQ(parse_range("2..5"), (std::pair<std::uint64_t, std::uint64_t>{2, 5}));
    EXPECT_THROW(parse_range("5..2"), ConfigError);
    EXPECT_THROW(parse_range("5-2"), ConfigError);
    EXPECT_EQ(interval_set(2, 5), (std::vector<Residue>{2, 3, 4, 5}));

    const std::string path = ::testing::TempDir() + "bgklab_set.txt";
    {
        std::ofstream f(path);
        f << "# residues\n1\n 3\n\n9\n";
    }
    EXPECT_EQ(read_set_file(path), (std::vector<Residue>{1, 3, 9}));
    std::remove(path.c_str());
}

TEST(Rng, MatchesReferenceSplitMix64) {
    // Reference stream of the sequential SplitMix64 generator from seed 0.
    SplitMix64 r(0);
    EXPECT_EQ(r.next(), 0xE220A8397B1DCDAFULL);
    EXPECT_EQ(r.next(), 0x6E789E6AA1B965F4ULL);
    EXPECT_EQ(r.next(), 0x06C45D188009454FULL);
}

TEST(Rng, CounterBasedAndStreamsDiffer) {
    SplitMix64 a(42, 3);
    const SplitMix64 b(42, 3);
    for (std::uint64_t i = 0; i < 10; ++i) EXPECT_EQ(a.next(), b.at(i));
    EXPECT_NE(SplitMix64(42, 3).at(0), SplitMix64(42, 4).at(0));
    SplitMix64 c(1);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_LT(c.below(7), 7U);
        const double u = c.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
    EXPECT_THROW(c.below(0), std::invalid_argument);
}

TEST(Rng, SampleDistinct) {
    SplitMix64 r(9);
    const auto s = sample_distinct(r, 1, 101, 100);
    std::vector<std::uint32_t> sorted(s.begin(), s.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::uint32_t i = 0; i < 100; ++i) EXPECT_EQ(sorted[i], i + 1);
    EXPECT_THROW(sample_distinct(r, 1, 10, 10), std::invalid_argument);
    EXPECT_EQ(random_set(PrimeField(101), 10, 5), random_set(PrimeField(101), 10, 5));
}

TEST(Json, FixedFormattingAndSortedKeys) {
    EXPECT_EQ(format_real(0.1), "0.1");
    EXPECT_EQ(format_real(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_real(-0.0), "0");
    EXPECT_EQ(format_real(1e300), "1e+300");
    EXPECT_EQ(format_real(std::nan("")), "nan");

    Report r("demo");
    r.set_quantity("zeta", 1.0 / 3.0);
    r.set_quantity("alpha", 2);
    r.check_le("row", 1.0, 2.0);
    r.check_ge("inf.row", std::numeric_limits<double>::infinity(), 0.0);
    const std::string text = dump_json(r.to_json());
    EXPECT_LT(text.find("\"alpha\""), text.find("\"zeta\""));
    EXPECT_NE(text.find("0.333333333333"), std::string::npos);
    EXPECT_NE(text.find("\"inf\""), std::string::npos);
    EXPECT_EQ(text.back(), '\n');
    EXPECT_EQ(text.find('\r'), std::string::npos);
    const Json back = Json::parse(text);
    EXPECT_EQ(back["schema_version"], "1");
    EXPECT_EQ(back["assertions"].size(), 2U);
    EXPECT_TRUE(back["pass"].get<bool>());
}

TEST(Report, PassAbsorbAndLog2Rows) {
    Report a("x");
    a.check_le("ok", 1, 2);
    Report b("y");
    b.check_ge("bad", 1, 2);
    b.warn("w");
    a.absorb(b, "sub");
    EXPECT_FALSE(a.pass());
    EXPECT_EQ(a.assertions().back().name, "sub.bad");
    EXPECT_EQ(a.warnings().back(), "sub.w");
    Report c;
    EXPECT_FALSE(c.check_le("nan", std::nan(""), 1.0));
    check_le_log2(c, "big", 10.0, 5000.0);
    EXPECT_EQ(c.assertions().back().name, "big.log2");
    EXPECT_TRUE(c.assertions().back().pass);
    check_le_log2(c, "small", 10.0, 4.0);
    EXPECT_EQ(c.assertions().back().name, "small");
}

TEST(ParallelMap, IndependentOfJobs) {
    auto fn = [](std::size_t i) { return static_cast<std::uint64_t>(i * i + 7); };
    const auto one = parallel_map<std::uint64_t>(1000, 1, fn);
    for (unsigned jobs : {2U, 4U, 8U, 64U}) EXPECT_EQ(parallel_map<std::uint64_t>(1000, jobs, fn), one);
    EXPECT_TRUE(parallel_map<int>(0, 4, [](std::size_t) { return 1; }).empty());
}

TEST(ParallelMap, RethrowsSmallestIndex) {
    auto fn = [](std::size_t i) -> int {
        if (i == 3 || i == 17) throw std::runtime_error("at " + std::to_string(i));
        return 0;
    };
    try {
        parallel_map<int>(20, 1, fn);
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "at 3");
    }
    EXPECT_THROW(parallel_map<int>(20, 4, fn), std::runtime_error);
}

TEST(Budget, OverrideAndCharge) {
    EXPECT_EQ(effective_budget(50), budget_override().value_or(50));
    set_budget_override(10);
    EXPECT_EQ(effective_budget(50), 10U);
    EXPECT_THROW(charge("x", 11, 50), BudgetError);
    EXPECT_NO_THROW(charge("x", 10, 50));
    set_budget_override(0);
    EXPECT_FALSE(budget_override().has_value());
}

namespace {

VerifyOptions small_options() {
    VerifyOptions o;
    o.densities_per_prime = 2;
    o.identity_primes = {13, 101};
    o.extract_primes = {157};
    o.scan_max_p = 101;
    o.gauss_max_p = 53;
    return o;
}

}  // namespace

TEST(Verify, SmallSuitePassesAndIsJobsInvariant) {
    VerifyOptions o = small_options();
    const VerifyResult one = run_verify(o);
    EXPECT_TRUE(one.report.pass());
    EXPECT_FALSE(one.budget_exhausted);
    o.jobs = 4;
    const VerifyResult four = run_verify(o);
    EXPECT_EQ(dump_json(one.report.to_json()), dump_json(four.report.to_json()));
}

TEST(Verify, TinyBudgetFlagsExhaustion) {
    set_budget_override(1);
    VerifyOptions o = small_options();
    const VerifyResult r = run_verify(o);
    set_budget_override(0);
    EXPECT_TRUE(r.budget_exhausted);
    EXPECT_FALSE(r.report.warnings().empty());
}
