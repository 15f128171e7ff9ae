#pragma once

// Experiment plumbing behind the command-line tool: key = value config
// files, residue-set inputs, seeded instance corpora and the verify suite.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bgklab/bsg.hpp"
#include "bgklab/budget.hpp"
#include "bgklab/distributions.hpp"
#include "bgklab/fp_core.hpp"
#include "bgklab/parallel.hpp"
#include "bgklab/report.hpp"
#include "bgklab/rng.hpp"
#include "bgklab/setstats.hpp"
#include "bgklab/structured.hpp"
#include "bgklab/walk.hpp"

namespace bgklab {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Config files and set inputs
// ---------------------------------------------------------------------------

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

/// `key = value` lines; blank lines and lines starting with '#' are skipped.
/// Keys repeat the long flag names without the leading dashes.
inline std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        for (char c : key) {
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')) {
                throw ConfigError("config line " + std::to_string(lineno) + ": bad key '" + key + "'");
            }
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

inline std::vector<std::pair<std::string, std::string>> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

inline std::uint64_t parse_uint(std::string_view s, const char* what) {
    const std::string t = trim(s);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError(std::string(what) + ": '" + t + "' is not a nonnegative integer");
    }
    try {
        return std::stoull(t);
    } catch (const std::exception&) {
        throw ConfigError(std::string(what) + ": '" + t + "' out of range");
    }
}

/// "1,3,9" (commas or whitespace).
inline std::vector<Residue> parse_set_inline(std::string_view text) {
    std::vector<Residue> out;
    std::string tok;
    auto flush = [&] {
        if (!tok.empty()) out.push_back(static_cast<Residue>(parse_uint(tok, "set element")));
        tok.clear();
    };
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            flush();
        } else {
            tok += c;
        }
    }
    flush();
    if (out.empty()) throw ConfigError("empty set");
    return out;
}

/// One residue per line; '#' comments allowed.
inline std::vector<Residue> read_set_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read set file " + path);
    std::vector<Residue> out;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        out.push_back(static_cast<Residue>(parse_uint(t, "set file entry")));
    }
    if (out.empty()) throw ConfigError("set file " + path + " is empty");
    return out;
}

/// "a..b", inclusive.
inline std::pair<std::uint64_t, std::uint64_t> parse_range(std::string_view text) {
    const auto dots = text.find("..");
    if (dots == std::string_view::npos) throw ConfigError("range '" + std::string(text) + "': expected a..b");
    const auto lo = parse_uint(text.substr(0, dots), "range start");
    const auto hi = parse_uint(text.substr(dots + 2), "range end");
    if (lo > hi) throw ConfigError("range '" + std::string(text) + "' is empty");
    return {lo, hi};
}

inline std::vector<Residue> interval_set(std::uint64_t lo, std::uint64_t hi) {
    std::vector<Residue> out;
    for (std::uint64_t x = lo; x <= hi; ++x) out.push_back(static_cast<Residue>(x));
    return out;
}

/// m distinct nonzero residues, stream 0 of the seed.
inline std::vector<Residue> random_set(const PrimeField& field, std::size_t m, std::uint64_t seed) {
    SplitMix64 rng(seed);
    return sample_distinct(rng, 1, static_cast<std::uint32_t>(field.p()), m);
}

inline std::vector<Residue> geometric_progression(const PrimeField& field, Residue ratio, std::size_t m) {
    std::vector<Residue> out;
    Residue x = 1;
    for (std::size_t i = 0; i < m; ++i) {
        out.push_back(x);
        x = field.mul(x, ratio);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Seeded corpora
// ---------------------------------------------------------------------------

/// Density number i of the identity suite for one prime, from its own stream.
/// Shapes cycle through full support, sparse support, uniform on a random
/// set, and a sparse density avoiding 0.
inline DistFp random_density(const PrimeField& field, std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 rng(seed, stream);
    const auto p = static_cast<std::uint32_t>(field.p());
    std::vector<double> w(p, 0.0);
    switch (stream % 4) {
        case 0:
            for (auto& v : w) v = rng.uniform() + 1e-3;
            break;
        case 1: {
            const std::size_t m = 1 + rng.below(std::min<std::uint32_t>(p, 64));
            for (Residue x : sample_distinct(rng, 0, p, m)) w[x] = rng.uniform() + 1e-3;
            break;
        }
        case 2: {
            const std::size_t m = 1 + rng.below(p);
            for (Residue x : sample_distinct(rng, 0, p, m)) w[x] = 1.0;
            break;
        }
        default: {
            const std::size_t m = 1 + rng.below(std::min<std::uint32_t>(p - 1, 64));
            for (Residue x : sample_distinct(rng, 1, p, m)) w[x] = rng.uniform() + 1e-3;
            break;
        }
    }
    return from_weights(field, std::move(w));
}

struct CorpusSet {
    std::string label;
    FpSet set;
};

/// Subgroups, intervals, geometric progressions, random sets and unions in
/// F_101, F_257 and F_1009, each in both group contexts, |A| <= 512.
inline std::vector<CorpusSet> bsg_corpus(std::uint64_t seed) {
    std::vector<CorpusSet> out;
    std::uint64_t stream = 1000;
    for (std::uint64_t p : {101ULL, 257ULL, 1009ULL}) {
        const PrimeField field(p);
        std::vector<std::pair<std::string, std::vector<Residue>>> raw;
        const std::string tag = "p=" + std::to_string(p) + ".";
        for (std::uint64_t n : divisors(p - 1)) {
            if (n <= 512) raw.emplace_back(tag + "subgroup." + std::to_string(n), subgroup_of_order(field, n).elements());
        }
        for (std::uint64_t m : {2ULL, 5ULL, 10ULL, 30ULL, 100ULL, 300ULL, 512ULL}) {
            if (m < p) raw.emplace_back(tag + "interval.1.." + std::to_string(m), interval_set(1, m));
        }
        for (Residue g : {2U, 3U}) {
            for (std::size_t m : {4UL, 10UL, 30UL}) {
                const auto gp = geometric_progression(field, g, m);
                raw.emplace_back(tag + "gp." + std::to_string(g) + "^" + std::to_string(m), gp);
            }
        }
        for (std::size_t m : {3UL, 10UL, 40UL, 150UL, 400UL}) {
            if (m >= p) continue;
            SplitMix64 rng(seed, stream++);
            raw.emplace_back(tag + "random." + std::to_string(m),
                             sample_distinct(rng, 1, static_cast<std::uint32_t>(p), m));
        }
        {
            auto u = subgroup_of_order(field, divisors(p - 1)[1]).elements();
            const auto iv = interval_set(1, std::min<std::uint64_t>(20, p - 1));
            u.insert(u.end(), iv.begin(), iv.end());
            raw.emplace_back(tag + "union.subgroup+interval", u);
            SplitMix64 rng(seed, stream++);
            const Subgroup h = subgroup_of_order(field, divisors(p - 1)[2]);
            std::vector<Residue> cosets2;
            for (int c = 0; c < 2; ++c) {
                const auto t = static_cast<Residue>(1 + rng.below(p - 1));
                for (Residue x : h.elements()) cosets2.push_back(field.mul(t, x));
            }
            raw.emplace_back(tag + "union.two_cosets", cosets2);
        }
        for (const auto& [label, elems] : raw) {
            for (GroupMode mode : {GroupMode::additive, GroupMode::multiplicative}) {
                out.push_back({label + "." + to_string(mode), FpSet(GroupCtx(field, mode), elems)});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Verify suite
// ---------------------------------------------------------------------------

struct VerifyOptions {
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    std::size_t densities_per_prime = 20;
    std::vector<std::uint64_t> identity_primes{13, 101, 157, 257, 1009, 2003};
    std::vector<std::uint64_t> extract_primes{157, 1009, 2003};
    std::uint64_t scan_max_p = 1009;
    std::uint64_t gauss_max_p = 509;
};

struct VerifyResult {
    Report report;
    bool budget_exhausted = false;
};

namespace detail {

struct VerifyTask {
    std::string name;
    std::function<Report()> run;
};

/// Max over a family of |lhs - rhs| style rows collapses into one row.
class WorstCase {
public:
    void diff(double d) {
        if (std::isnan(d)) nan_ = true;
        else worst_ = std::max(worst_, d);
    }
    double value() const noexcept { return nan_ ? std::nan("") : worst_; }

private:
    double worst_ = 0.0;
    bool nan_ = false;
};

inline Report identity_task(const PrimeField& field, std::uint64_t seed, std::uint64_t i) {
    const DistFp X = random_density(field, seed, i);
    Report rep("verify");
    rep.set_quantity("support_size", X.support().size());
    rep.absorb(verify_fourier_duality(X), "");
    rep.absorb(verify_link2(X), "");
    return rep;
}

/// Coset invariance of phi_S, exact spectrum membership and cosets, and
/// phi_{X_k} = |phi_S|^{2k} against the transform of an explicit convolution.
inline Report subgroup_task(const Subgroup& sub) {
    Report rep("verify");
    const auto& field = sub.field();
    const std::uint64_t p = field.p();
    const SubgroupFourier F(sub);
    std::vector<Complex> direct(p);
    WorstCase coset;
    for (std::uint64_t a = 0; a < p; ++a) {
        direct[a] = subgroup_char_sum(sub, static_cast<Residue>(a));
        coset.diff(std::abs(direct[a] - F(static_cast<Residue>(a))));
    }
    rep.check_diff("lm-uniform-properties.coset_invariance", coset.value(), kIdentityTolerance);

    KahanSum parseval;
    for (const auto& z : direct) parseval += std::norm(z);
    rep.check_close("lm-uniform-properties.parseval", parseval.value(),
                    static_cast<double>(p) / static_cast<double>(sub.order()), kIdentityTolerance * static_cast<double>(p));

    for (double nu : {0.1, 0.25, 0.5, 1.0}) {
        const Spectrum s = spectrum(F, nu);
        bool exact = s.contains(0);
        std::size_t count = 0;
        for (std::uint64_t a = 0; a < p; ++a) {
            const bool in = a == 0 || std::abs(direct[a]) > s.threshold;
            const bool guarded = a != 0 && std::abs(std::abs(direct[a]) - s.threshold) <= kSpectrumGuard;
            if (in != s.contains(static_cast<Residue>(a)) && !guarded) exact = false;
            count += s.contains(static_cast<Residue>(a)) ? 1 : 0;
        }
        bool union_of_cosets = count == s.size();
        for (Residue a : s.members) {
            if (a == 0) continue;
            for (Residue h : sub.elements()) union_of_cosets = union_of_cosets && s.contains(field.mul(a, h));
        }
        const std::string tag = "lm-uniform-properties.spectrum.nu=" + format_real(nu);
        rep.check_true(tag + ".membership", exact);
        rep.check_true(tag + ".union_of_cosets", union_of_cosets);
        rep.check_le(tag + ".size", static_cast<double>(s.size()),
                     std::pow(static_cast<double>(p), 1.0 + 2.0 * nu) / static_cast<double>(sub.order()) + 1.0);
    }

    // X_1 = S - S', X_2 = X_1 + X_1', X_4, X_5 = X_4 + X_1.
    const DistFp S = uniform_on(field, sub.elements());
    const DistFp x1 = convolve(S, negate(S));
    const DistFp x2 = convolve(x1, x1);
    const DistFp x5 = convolve(convolve(x2, x2), x1);
    const std::pair<std::uint64_t, const DistFp*> walks[] = {{1, &x1}, {2, &x2}, {5, &x5}};
    for (const auto& [k, X] : walks) {
        const auto expect = char_fn(*X, TransformPath::direct).values();
        const auto got = walk_char_fn(WalkSpec(sub, k)).values();
        WorstCase w;
        for (std::uint64_t a = 0; a < p; ++a) w.diff(std::abs(expect[a] - got[a]));
        rep.check_diff("walk.char_fn.k=" + std::to_string(k), w.value(), kIdentityTolerance);
    }
    return rep;
}

inline Report expansion_task(const Subgroup& sub, std::uint64_t k) {
    Report rep("verify");
    const ExpansionCheck check(WalkSpec(sub, k));
    WorstCase identity;
    double margin = std::numeric_limits<double>::infinity();
    std::size_t literal_fail = 0;
    for (std::uint64_t a = 0; a < sub.p(); ++a) {
        const Report r = check.check(static_cast<Residue>(a));
        for (const auto& row : r.assertions()) {
            if (row.name == "eq-expansion.identity") identity.diff(row.lhs);
            if (row.name == "eq-expansion") margin = std::min(margin, row.lhs - row.rhs);
        }
        if (!r.quantities().at("literal_reading_holds").get<bool>()) ++literal_fail;
    }
    rep.set_quantity("literal_reading_failures", literal_fail);
    rep.check_diff("eq-expansion.identity", identity.value(), kIdentityTolerance);
    rep.check_ge("eq-expansion.min_margin", margin, 0.0, kIdentityTolerance);
    return rep;
}

inline Report bsg_task(const FpSet& A) {
    const auto cert = bsg(A);
    Report rep("verify");
    rep.absorb(cert.report, "");
    return rep;
}

/// Lemma hypotheses are built to hold: level sets of the stepping with
/// beta = 1/(|B| rho_Y(identity)), and the ratio-set mass for the energy bound.
inline Report lemma_task(const PrimeField& field, std::uint64_t seed, std::uint64_t i) {
    Report rep("verify");
    const DistFp X = random_density(field, seed, 5000 + i);
    const GroupCtx add(field, GroupMode::additive);
    const GroupCtx mul(field, GroupMode::multiplicative);

    std::vector<Residue> off_zero_support;
    std::vector<double> off_zero(field.size(), 0.0);
    for (Residue x : X.support()) {
        if (x != 0) {
            off_zero[x] = X(x);
            off_zero_support.push_back(x);
        }
    }
    for (const GroupCtx& ctx : {add, mul}) {
        const std::string tag = std::string(to_string(ctx.mode()));
        if (!ctx.additive() && off_zero_support.empty()) continue;
        const DistFp Xc = ctx.additive() ? X : from_weights(field, off_zero);
        const DistFp Y = stepping(Xc, ctx);
        const double rho0 = Y(ctx.identity());
        for (double alpha : {2.0, 8.0}) {
            std::vector<Residue> level;
            for (Residue y : Y.support()) {
                if (Y(y) >= rho0 / alpha * (1.0 - 1e-12)) level.push_back(y);
            }
            const FpSet B(ctx, level);
            const double beta = 1.0 / (static_cast<double>(B.size()) * rho0);
            rep.absorb(check_lemma_stepping(Xc, B, alpha, beta, ctx),
                       tag + ".alpha=" + format_real(alpha));
            rep.absorb(check_lemma_energy(Xc, B, ctx), tag + ".alpha=" + format_real(alpha));
        }
        rep.absorb(check_lemma_energy(Xc, FpSet(ctx, Xc.support()), ctx), tag + ".support");
    }
    return rep;
}

inline Report extract_task(const Subgroup& sub, std::uint64_t k) {
    const DistFp X = walk_distribution(SubgroupFourier(sub), k);
    Report rep("verify");
    rep.absorb(alt1_report(X, 0.1), "");
    return rep;
}

inline Report search_task(const Subgroup& sub, double theta) {
    const SubgroupFourier F(sub);
    const SearchResult s = search_k_nu(F, theta);
    Report rep("verify");
    rep.absorb(s.report, "");
    if (sub.p() <= 2003) rep.absorb(check_last_bound(F, s), "");
    return rep;
}

inline Report scan_task(std::uint64_t p_max) {
    Report rep("verify");
    const auto rows = all_subgroups_scan(2, p_max);
    double worst = -std::numeric_limits<double>::infinity();
    bool all = true;
    for (const auto& r : rows) {
        worst = std::max(worst, r.max_abs_sum - std::sqrt(static_cast<double>(r.p)));
        all = all && r.sqrt_p_ok;
    }
    rep.set_quantity("rows", rows.size());
    rep.check_le("sqrt_p.max_excess", worst, 1e-6);
    rep.check_true("sqrt_p.all_rows", all);
    return rep;
}

inline Report gauss_task(const PrimeField& field) {
    Report rep("verify");
    const std::uint64_t p = field.p();
    WorstCase identity;
    WorstCase quadratic;
    for (std::uint64_t d : divisors(p - 1)) {
        const GaussSumTable table(field, d);
        for (std::uint64_t a = 1; a < p; ++a) {
            const auto forms = table.forms(static_cast<Residue>(a));
            identity.diff(forms.discrepancy);
            if (d == 2) quadratic.diff(std::abs(std::abs(forms.direct) - std::sqrt(static_cast<double>(p))));
        }
    }
    rep.check_diff("gauss.subgroup_form", identity.value(), kIdentityTolerance);
    rep.check_diff("gauss.quadratic_modulus", quadratic.value(), 1e-6);
    return rep;
}

}  // namespace detail

/// The full identity and inequality suite. Tasks run on `jobs` threads and
/// are merged in declaration order, so the report does not depend on jobs.
/// A budget error stops the affected task only; the rest of the report is kept.
inline VerifyResult run_verify(const VerifyOptions& opt) {
    std::vector<detail::VerifyTask> tasks;
    for (std::uint64_t p : opt.identity_primes) {
        const PrimeField field(p);
        const std::string tag = "p=" + std::to_string(p);
        for (std::size_t i = 0; i < opt.densities_per_prime; ++i) {
            tasks.push_back({"identity." + tag + ".i=" + std::to_string(i),
                             [field, i, seed = opt.seed] { return detail::identity_task(field, seed, i); }});
        }
        for (const Subgroup& h : all_subgroups(field)) {
            tasks.push_back({"subgroup." + tag + ".n=" + std::to_string(h.order()),
                             [h] { return detail::subgroup_task(h); }});
        }
    }
    for (std::uint64_t p : {13ULL, 101ULL, 157ULL}) {
        for (const Subgroup& h : all_subgroups(PrimeField(p))) {
            for (std::uint64_t k : {1ULL, 2ULL, 3ULL}) {
                tasks.push_back({"expansion.p=" + std::to_string(p) + ".n=" + std::to_string(h.order()) +
                                     ".k=" + std::to_string(k),
                                 [h, k] { return detail::expansion_task(h, k); }});
            }
        }
    }
    for (auto& c : bsg_corpus(opt.seed)) {
        tasks.push_back({"bsg." + c.label, [A = c.set] { return detail::bsg_task(A); }});
    }
    for (std::uint64_t p : {101ULL, 157ULL}) {
        const PrimeField field(p);
        for (std::uint64_t i = 0; i < 10; ++i) {
            tasks.push_back({"lemmas.p=" + std::to_string(p) + ".i=" + std::to_string(i),
                             [field, i, seed = opt.seed] { return detail::lemma_task(field, seed, i); }});
        }
    }
    for (std::uint64_t p : opt.extract_primes) {
        for (const Subgroup& h : all_subgroups(PrimeField(p))) {
            for (std::uint64_t k : {1ULL, 2ULL}) {
                tasks.push_back({"extract.p=" + std::to_string(p) + ".n=" + std::to_string(h.order()) +
                                     ".k=" + std::to_string(k),
                                 [h, k] { return detail::extract_task(h, k); }});
            }
        }
    }
    for (std::uint64_t p : {157ULL, 1009ULL}) {
        const PrimeField field(p);
        for (const Subgroup& h : all_subgroups(field)) {
            if (static_cast<double>(h.order()) < std::sqrt(static_cast<double>(p))) continue;
            for (double theta : {0.3, 0.5}) {
                tasks.push_back({"search.p=" + std::to_string(p) + ".n=" + std::to_string(h.order()) +
                                     ".theta=" + format_real(theta),
                                 [h, theta] { return detail::search_task(h, theta); }});
            }
        }
    }
    tasks.push_back({"scan.p<=" + std::to_string(opt.scan_max_p), [m = opt.scan_max_p] { return detail::scan_task(m); }});
    for (std::uint64_t p : primes_in(3, opt.gauss_max_p)) {
        tasks.push_back({"gauss.p=" + std::to_string(p), [p] { return detail::gauss_task(PrimeField(p)); }});
    }

    struct Outcome {
        Report report;
        bool budget = false;
    };
    const auto outcomes = parallel_map<Outcome>(tasks.size(), opt.jobs, [&tasks](std::size_t i) {
        try {
            return Outcome{tasks[i].run(), false};
        } catch (const BudgetError& e) {
            Report r("verify");
            r.warn(std::string("budget exhausted: ") + e.what());
            return Outcome{std::move(r), true};
        }
    });

    VerifyResult result{Report("verify"), false};
    Report& rep = result.report;
    rep.set_input("seed", opt.seed);
    rep.set_input("densities_per_prime", opt.densities_per_prime);
    std::size_t budget_failures = 0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        rep.absorb(outcomes[i].report, tasks[i].name);
        if (outcomes[i].budget) ++budget_failures;
    }
    rep.set_quantity("tasks", tasks.size());
    rep.set_quantity("tasks_budget_exhausted", budget_failures);
    rep.set_quantity("assertion_rows", rep.assertions().size());
    result.budget_exhausted = budget_failures > 0;
    return result;
}

}  // namespace bgklab
