// bgklab: command-line driver for the subgroup-sum and sum-product experiments.
//
// Exit codes: 0 success, 1 assertion failure, 2 usage or config error,
// 3 budget exhausted.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bgklab/bgklab.hpp"

namespace {

using namespace bgklab;

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

const std::vector<std::string> kCommands{"scan", "verify", "bsg", "extract", "walk", "chain", "sumprod"};

/// Moves `--config FILE` entries in front of the command-line flags, so the
/// last value (the flag) wins.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::optional<std::string> path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("--config needs a file");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!path) return rest;
    std::vector<std::string> injected;
    for (const auto& [key, value] : load_config_file(*path)) {
        injected.push_back("--" + key);
        injected.push_back(value);
    }
    auto cmd = rest.begin();
    while (cmd != rest.end() && std::find(kCommands.begin(), kCommands.end(), *cmd) == kCommands.end()) ++cmd;
    if (cmd == rest.end()) throw ConfigError("--config given without a command");
    rest.insert(cmd + 1, injected.begin(), injected.end());
    return rest;
}

struct SetInput {
    std::string inline_set;
    std::string set_file;
    std::uint64_t subgroup_order = 0;
    std::string interval;
    std::uint64_t random = 0;
    std::uint64_t seed = 0;

    void add_to(CLI::App* app) {
        app->add_option("--set", inline_set, "Residues, comma separated");
        app->add_option("--set-file", set_file, "File with one residue per line");
        app->add_option("--subgroup-order", subgroup_order, "Subgroup of F_p^x of this order");
        app->add_option("--interval", interval, "Residues a..b");
        app->add_option("--random", random, "m random nonzero residues");
        app->add_option("--seed", seed, "Seed for --random");
    }

    bool given() const {
        return !inline_set.empty() || !set_file.empty() || subgroup_order > 0 || !interval.empty() || random > 0;
    }

    std::vector<Residue> build(const PrimeField& field) const {
        const int sources = (!inline_set.empty()) + (!set_file.empty()) + (subgroup_order > 0) +
                            (!interval.empty()) + (random > 0);
        if (sources != 1) throw ConfigError("give exactly one of --set, --set-file, --subgroup-order, --interval, --random");
        std::vector<Residue> out;
        if (!inline_set.empty()) out = parse_set_inline(inline_set);
        if (!set_file.empty()) out = read_set_file(set_file);
        if (subgroup_order > 0) out = subgroup_of_order(field, subgroup_order).elements();
        if (!interval.empty()) {
            const auto [lo, hi] = parse_range(interval);
            out = interval_set(lo, hi);
        }
        if (random > 0) {
            if (random >= field.p()) throw ConfigError("--random must be < p");
            out = random_set(field, random, seed);
        }
        for (Residue x : out) {
            if (x >= field.p()) throw ConfigError("residue " + std::to_string(x) + " is not reduced mod p");
        }
        return out;
    }
};

GroupMode parse_mode(const std::string& s) {
    if (s == "additive") return GroupMode::additive;
    if (s == "multiplicative") return GroupMode::multiplicative;
    throw ConfigError("--mode must be additive or multiplicative");
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + out);
    f << text;
}

int emit_report(const Report& rep, const std::string& out) {
    emit(dump_json(rep.to_json()), out);
    return rep.pass() ? kExitOk : kExitAssertion;
}

int run(int argc, char** argv) {
    CLI::App app{"Exponential sums over subgroups of F_p^x, energies and sum-product extraction"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string out;
    std::uint64_t budget = 0;
    auto common = [&](CLI::App* sub) {
        sub->add_option("-o,--out", out, "Output file (default stdout)");
        sub->add_option("--budget", budget, "Term budget for every guarded operation")->check(CLI::PositiveNumber);
    };

    // scan
    std::uint64_t p_min = 0, p_max = 0, p_single = 0;
    double gamma = 0.5;
    unsigned jobs = 1;
    auto* scan = app.add_subcommand("scan", "Max |sum_{x in H} e(ax/p)| over primes and subgroups with |H| >= p^gamma");
    scan->add_option("--p-min", p_min);
    scan->add_option("--p-max", p_max);
    scan->add_option("--p", p_single, "Single prime (sets both ends)");
    scan->add_option("--gamma", gamma);
    scan->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
    common(scan);

    // verify
    std::uint64_t seed = 0;
    std::size_t densities = 20;
    auto* verify = app.add_subcommand("verify", "Run the identity and inequality suite");
    verify->add_option("--seed", seed);
    verify->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
    verify->add_option("--densities", densities, "Random densities per prime")->check(CLI::PositiveNumber);
    common(verify);

    // bsg
    std::uint64_t p = 0;
    std::string mode = "additive";
    std::optional<double> alpha;
    SetInput bsg_set;
    auto* bsg_cmd = app.add_subcommand("bsg", "Extract B with small B.B^{-1} from a set of large energy");
    bsg_cmd->add_option("--p", p)->required();
    bsg_cmd->add_option("--mode", mode);
    bsg_cmd->add_option("--alpha", alpha);
    bsg_set.add_to(bsg_cmd);
    common(bsg_cmd);

    // extract
    std::optional<Residue> dirac_at;
    std::uint64_t walk_k = 0;
    double eta = 0.1;
    SetInput extract_set;
    auto* extract = app.add_subcommand("extract", "Case analysis and structured-set certificate for a distribution");
    extract->add_option("--p", p)->required();
    extract->add_option("--dirac", dirac_at, "Point mass at this residue");
    extract->add_option("--walk-k", walk_k, "Walk X_k over --subgroup-order");
    extract->add_option("--eta", eta);
    extract_set.add_to(extract);
    common(extract);

    // walk
    std::uint64_t order = 0;
    double theta = 0.5;
    auto* walk = app.add_subcommand("walk", "Search (k, nu) for the walk over a subgroup");
    walk->add_option("--p", p)->required();
    walk->add_option("--subgroup-order", order)->required();
    walk->add_option("--theta", theta);
    common(walk);

    // chain
    auto* chain = app.add_subcommand("chain", "Closing chain of bounds for the walk over a subgroup");
    chain->add_option("--p", p)->required();
    chain->add_option("--subgroup-order", order)->required();
    double chain_gamma = 0.9;
    double chain_theta = 0.05;
    chain->add_option("--gamma", chain_gamma);
    chain->add_option("--theta", chain_theta);
    chain->add_option("--eta", eta);
    common(chain);

    // sumprod
    SetInput sp_set;
    auto* sumprod = app.add_subcommand("sumprod", "|A+A|, |A.A| and the growth exponent");
    sumprod->add_option("--p", p)->required();
    sp_set.add_to(sumprod);
    common(sumprod);

    const auto args = expand_config(argc, argv);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (budget > 0) set_budget_override(budget);

    if (scan->parsed()) {
        if (p_single > 0) p_min = p_max = p_single;
        if (p_min == 0 || p_max == 0) throw ConfigError("scan needs --p or --p-min and --p-max");
        const auto rows = theorem_scan(p_min, p_max, gamma, jobs);
        emit(scan_csv(rows), out);
        for (const auto& r : rows) {
            if (!r.sqrt_p_ok) return kExitAssertion;
        }
        return kExitOk;
    }
    if (verify->parsed()) {
        VerifyOptions opt;
        opt.seed = seed;
        opt.jobs = jobs;
        opt.densities_per_prime = densities;
        const VerifyResult res = run_verify(opt);
        const int code = emit_report(res.report, out);
        return res.budget_exhausted ? kExitBudget : code;
    }

    const PrimeField field(p);
    if (bsg_cmd->parsed()) {
        const GroupCtx ctx(field, parse_mode(mode));
        const FpSet A(ctx, bsg_set.build(field));
        BsgCertificate cert = bsg(A, alpha);
        cert.report.set_quantity("B", cert.B.elements());
        return emit_report(cert.report, out);
    }
    if (extract->parsed()) {
        const int sources = dirac_at.has_value() + (walk_k > 0) + (extract_set.given() && walk_k == 0);
        if (sources != 1) throw ConfigError("give exactly one of --dirac, --walk-k with --subgroup-order, or a set");
        std::optional<DistFp> X;
        if (dirac_at) X = dirac(field, *dirac_at);
        if (walk_k > 0) {
            if (extract_set.subgroup_order == 0) throw ConfigError("--walk-k needs --subgroup-order");
            X = walk_distribution(WalkSpec(subgroup_of_order(field, extract_set.subgroup_order), walk_k));
        } else if (!dirac_at) {
            const auto elems = extract_set.build(field);
            X = uniform_on(field, elems);
        }
        Report rep = alt1_report(*X, eta);
        return emit_report(rep, out);
    }
    if (walk->parsed()) {
        const SearchResult res = search_k_nu(subgroup_of_order(field, order), theta);
        return emit_report(res.report, out);
    }
    if (chain->parsed()) {
        return emit_report(final_chain_report(subgroup_of_order(field, order), chain_gamma, chain_theta, eta), out);
    }
    if (sumprod->parsed()) {
        const auto elems = sp_set.build(field);
        const auto stats = expansion_stats(field, elems);
        Report rep("sumprod");
        rep.set_input("p", p);
        rep.set_quantity("set_size", stats.set_size);
        rep.set_quantity("sum_size", stats.sum_size);
        rep.set_quantity("prod_size", stats.prod_size);
        rep.set_quantity("exponent", stats.exponent);
        return emit_report(rep, out);
    }
    return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const BudgetError& e) {
        std::cerr << "budget: " << e.what() << "\n";
        return kExitBudget;
    } catch (const ConfigError& e) {
        std::cerr << "config: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAssertion;
    }
}
