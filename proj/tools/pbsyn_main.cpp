// pbsyn: participatory-budgeting solver with ballot-derived project synergies.
//
// Subcommands: solve, analyze, compare, stats, axioms, oracle.
// Exit codes: 0 ok, 1 input error, 2 limit-truncated, 3 verification failure
// (oracle mismatch or failed axiom run).

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "pbsyn/axioms.hpp"
#include "pbsyn/emit.hpp"
#include "pbsyn/scenario.hpp"
#include "pbsyn/solver.hpp"
#include "pbsyn/synergy.hpp"

namespace fs = std::filesystem;
using namespace pbsyn;

namespace {

constexpr int kExitOk = 0;

/// Seeded batch generator for `axioms` runs without input files: random
/// knapsack-voting scenarios with ballots filled toward ~70% of the budget.
Scenario generated_scenario(std::mt19937_64& rng) {
    auto pick = [&](std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };
    Scenario s;
    const auto n = static_cast<std::uint32_t>(pick(4, 8));
    const auto v = static_cast<std::uint32_t>(pick(3, 12));
    s.budget = pick(10, 40);
    s.meta["budget"] = std::to_string(s.budget);
    for (std::uint32_t i = 0; i < n; ++i) {
        std::string num = std::to_string(i + 1);
        if (num.size() < 2) num.insert(0, "0");
        s.projects.push_back(Project{"p" + num, "", pick(1, s.budget), {}});
    }
    std::vector<std::uint32_t> order(n);
    for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
    for (std::uint32_t i = 0; i < v; ++i) {
        Ballot b;
        std::string num = std::to_string(i + 1);
        if (num.size() < 2) num.insert(0, "0");
        b.voter_id = "v" + num;
        std::shuffle(order.begin(), order.end(), rng);
        const std::int64_t target = (s.budget * static_cast<std::int64_t>(55 + rng() % 30)) / 100;
        std::int64_t spent = 0;
        for (std::uint32_t idx : order) {
            if (spent + s.projects[idx].cost > target) continue;
            spent += s.projects[idx].cost;
            b.approvals.push_back(idx);
            b.mask |= mask_bit(idx);
        }
        s.ballots.push_back(std::move(b));
    }
    return validate(s, ValidationPolicy::Strict);
}
constexpr int kExitInputError = 1;
constexpr int kExitTruncated = 2;
constexpr int kExitVerificationFailure = 3;

struct CommonConfig {
    std::vector<std::string> inputs;
    std::string alpha = "sum";
    std::string k_text = "2";
    std::string policy = "drop";
    std::string format = "json";
    std::string out_path;
    std::optional<std::uint64_t> max_nodes;
    std::optional<std::int64_t> timeout_ms;
    std::uint64_t seed = 42;
    std::string threshold = "0";
};

Additivity parse_k(const std::string& text) {
    if (text == "unbounded") return std::nullopt;
    const int k = std::stoi(text);
    if (k < 1) throw CLI::ValidationError("--k must be >= 1 or 'unbounded'");
    return static_cast<std::uint32_t>(k);
}

ValidationPolicy parse_policy(const std::string& text) {
    if (text == "strict") return ValidationPolicy::Strict;
    if (text == "drop") return ValidationPolicy::Drop;
    if (text == "truncate") return ValidationPolicy::Truncate;
    throw CLI::ValidationError("--policy must be strict|drop|truncate");
}

Aggregator parse_alpha(const std::string& text) {
    const auto agg = aggregator_from_name(text);
    if (!agg) throw CLI::ValidationError("--alpha must be sum|min|prod");
    return *agg;
}

/// Files or directories -> sorted list of .pb files.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const std::string& input : inputs) {
        const fs::path p(input);
        if (fs::is_directory(p)) {
            for (const auto& entry : fs::directory_iterator(p))
                if (entry.is_regular_file() && entry.path().extension() == ".pb")
                    files.push_back(entry.path());
        } else if (fs::is_regular_file(p)) {
            files.push_back(p);
        } else {
            throw std::runtime_error("no such file or directory: " + input);
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Scenario load_scenario(const fs::path& path, ValidationPolicy policy,
                       ValidationReport* report = nullptr) {
    return validate(parse_pabulib(read_file(path)), policy, report);
}

void write_output(const CommonConfig& cfg, const std::string& text) {
    if (cfg.out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + cfg.out_path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << "\n";
}

SolveOptions solve_options(const CommonConfig& cfg) {
    SolveOptions options;
    options.max_nodes = cfg.max_nodes;
    options.max_millis = cfg.timeout_ms;
    return options;
}

int run_solve(const CommonConfig& cfg) {
    const auto files = expand_inputs(cfg.inputs);
    if (files.empty()) throw std::runtime_error("no input files");
    const Aggregator agg = parse_alpha(cfg.alpha);
    const Additivity k = parse_k(cfg.k_text);

    int exit_code = kExitOk;
    Json all = Json::array();
    std::ostringstream csv;
    csv << solve_report_csv_header() << "\n";
    std::ostringstream text;

    for (const fs::path& file : files) {
        const Scenario s = load_scenario(file, parse_policy(cfg.policy));
        const SynergyModel model = build_model(s, k);
        const SolveReport report = branch_and_bound(model, s, agg, solve_options(cfg));
        if (!report.optimal) exit_code = std::max(exit_code, kExitTruncated);

        Json j = solve_report_json(s, report);
        j["file"] = file.string();
        all.push_back(std::move(j));
        csv << solve_report_csv_row(file.string(), s, report) << "\n";
        text << file.string() << ": bundle {";
        const auto bundle_ids = subset_ids(s, report.bundle.mask);
        for (std::size_t i = 0; i < bundle_ids.size(); ++i)
            text << (i ? "," : "") << bundle_ids[i];
        text << "} score " << to_fraction_string(report.score.value) << " ("
             << to_decimal_string(report.score.value, 4) << ") "
             << (report.optimal ? "optimal" : "TRUNCATED") << "\n";
    }

    if (cfg.format == "json")
        write_output(cfg, (all.size() == 1 ? all[0] : all).dump(2));
    else if (cfg.format == "csv")
        write_output(cfg, csv.str());
    else
        write_output(cfg, text.str());
    return exit_code;
}

int run_analyze(const CommonConfig& cfg, std::uint32_t limit) {
    const auto files = expand_inputs(cfg.inputs);
    if (files.empty()) throw std::runtime_error("no input files");
    const Additivity k = parse_k(cfg.k_text);
    const Rational threshold = parse_rational(cfg.threshold);

    Json all = Json::array();
    std::ostringstream csv;
    std::ostringstream text;
    for (const fs::path& file : files) {
        const Scenario s = load_scenario(file, parse_policy(cfg.policy));
        const SynergyModel model = build_model(s, k);
        const auto records = interaction_report(model, s, limit, threshold);

        Json j;
        j["file"] = file.string();
        j["interactions"] = interaction_report_json(s, records);
        if (k && *k < 2)
            j["note"] = "k=1 admits no interactions";
        all.push_back(std::move(j));
        csv << interaction_report_csv(s, records);
        text << file.string() << ": " << records.size() << " interactions";
        if (k && *k < 2) text << " (k=1 admits no interactions)";
        text << "\n";
        for (const auto& r : records) {
            const auto sid = subset_ids(s, r.subset);
            text << "  {";
            for (std::size_t i = 0; i < sid.size(); ++i) text << (i ? "," : "") << sid[i];
            text << "} " << classification_name(r.classification) << " m="
                 << to_fraction_string(r.transform) << "\n";
        }
    }
    if (cfg.format == "json")
        write_output(cfg, (all.size() == 1 ? all[0] : all).dump(2));
    else if (cfg.format == "csv")
        write_output(cfg, csv.str());
    else
        write_output(cfg, text.str());
    return kExitOk;
}

int run_compare(const CommonConfig& cfg) {
    const auto files = expand_inputs(cfg.inputs);
    if (files.empty()) throw std::runtime_error("no input files");
    const Aggregator agg = parse_alpha(cfg.alpha);
    const Additivity k = parse_k(cfg.k_text);

    Json all = Json::array();
    std::ostringstream csv;
    csv << comparison_csv_header() << "\n";
    std::ostringstream text;
    std::size_t differing = 0;
    Rational realloc_total = 0;

    for (const fs::path& file : files) {
        const Scenario s = load_scenario(file, parse_policy(cfg.policy));
        const ComparisonRecord rec = compare_with_linear(s, agg, k, solve_options(cfg));
        if (rec.differs) ++differing;
        realloc_total += rec.reallocation;
        all.push_back(comparison_json(file.string(), s, rec));
        csv << comparison_csv_row(file.string(), s, rec) << "\n";
        text << file.string() << ": " << (rec.differs ? "DIFFERS" : "same") << " reallocation "
             << to_decimal_string(rec.reallocation, 4) << "\n";
    }

    if (files.size() > 1) {
        const Rational frac(static_cast<std::int64_t>(differing),
                            static_cast<std::int64_t>(files.size()));
        Json agg_row;
        agg_row["file"] = "(aggregate)";
        agg_row["instances"] = files.size();
        agg_row["differing"] = differing;
        agg_row["differing_fraction"] = rational_to_double(frac);
        agg_row["mean_reallocation"] =
            rational_to_double(realloc_total / static_cast<std::int64_t>(files.size()));
        all.push_back(std::move(agg_row));
        text << "aggregate: " << differing << "/" << files.size() << " instances differ\n";
    }

    if (cfg.format == "json")
        write_output(cfg, (all.size() == 1 ? all[0] : all).dump(2));
    else if (cfg.format == "csv")
        write_output(cfg, csv.str());
    else
        write_output(cfg, text.str());
    return kExitOk;
}

int run_stats(const CommonConfig& cfg) {
    const auto files = expand_inputs(cfg.inputs);
    if (files.empty()) throw std::runtime_error("no input files");

    Json all = Json::array();
    std::ostringstream csv;
    csv << stats_csv_header() << "\n";
    std::ostringstream text;

    std::array<Rational, 10> decile_sum{};
    Rational mean_sum = 0;
    for (const fs::path& file : files) {
        const Scenario s = load_scenario(file, parse_policy(cfg.policy));
        InstanceStats stats;
        stats.file = file.string();
        stats.deciles = cost_decile_vector(s);
        stats.utilization = budget_utilization(s);
        for (int i = 0; i < 10; ++i) decile_sum[i] += stats.deciles[i];
        mean_sum += stats.utilization.mean;
        all.push_back(stats_json(stats));
        csv << stats_csv_row(stats) << "\n";
        text << file.string() << ": mean utilization "
             << to_decimal_string(stats.utilization.mean, 4) << ", median "
             << to_decimal_string(stats.utilization.median, 4) << "\n";
    }

    if (files.size() > 1) {
        const auto count = static_cast<std::int64_t>(files.size());
        InstanceStats avg;
        avg.file = "(corpus average)";
        for (int i = 0; i < 10; ++i) avg.deciles[i] = decile_sum[i] / count;
        avg.utilization.mean = mean_sum / count;
        avg.utilization.median = 0;
        Json j = stats_json(avg);
        j.erase("utilization_median");
        j.erase("utilization_median_decimal");
        all.push_back(std::move(j));
    }

    if (cfg.format == "json")
        write_output(cfg, (all.size() == 1 ? all[0] : all).dump(2));
    else if (cfg.format == "csv")
        write_output(cfg, csv.str());
    else
        write_output(cfg, text.str());
    return kExitOk;
}

int run_axioms(const CommonConfig& cfg, bool fixtures_only, bool corrupt, std::uint32_t count) {
    const Additivity k = parse_k(cfg.k_text);
    std::vector<AxiomVerdict> verdicts;

    const auto check_instance = [&](const Scenario& s, const std::string& tag) {
        SynergyModel model = build_model(s, k);
        if (corrupt && !s.projects.empty())
            model.debug_override_transform(mask_bit(0), Rational(1'000'000));

        auto tagged = [&](AxiomVerdict v) {
            v.axiom = tag + v.axiom;
            verdicts.push_back(std::move(v));
        };
        tagged(check_cost_consistency(model, s));
        tagged(check_superset_monotonicity(model, s, 4, 1000, cfg.seed));
        auto [pos, neg] = check_synergy_effects(model, s);
        tagged(std::move(pos));
        tagged(std::move(neg));

        if (const auto cand = find_regrouping_candidate(s)) {
            tagged(check_regrouping_monotonicity(s, k, cand->subset, cand->voter_i,
                                                 cand->voter_j));
        } else {
            AxiomVerdict v;
            v.axiom = tag + "regrouping monotonicity";
            v.holds = true;
            v.universe = "no qualifying (S, v_i, v_j) in this instance; vacuous";
            verdicts.push_back(std::move(v));
        }

        std::optional<std::pair<std::uint32_t, std::uint32_t>> equal_pair;
        for (std::uint32_t i = 0; i < s.projects.size() && !equal_pair; ++i)
            for (std::uint32_t j = i + 1; j < s.projects.size() && !equal_pair; ++j)
                if (s.projects[i].cost == s.projects[j].cost) equal_pair = {i, j};
        if (equal_pair) {
            tagged(check_cost_aware_neutrality(s, k, equal_pair->first, equal_pair->second));
        } else {
            AxiomVerdict v;
            v.axiom = tag + "cost-aware neutrality";
            v.holds = true;
            v.universe = "no equal-cost project pair; vacuous";
            verdicts.push_back(std::move(v));
        }
        tagged(check_inclusion_maximality(model, s, parse_alpha(cfg.alpha)));
    };

    if (!fixtures_only) {
        if (!cfg.inputs.empty()) {
            for (const fs::path& file : expand_inputs(cfg.inputs))
                check_instance(load_scenario(file, parse_policy(cfg.policy)),
                               file.filename().string() + ": ");
        } else {
            std::mt19937_64 rng(cfg.seed);
            for (std::uint32_t i = 0; i < count; ++i)
                check_instance(generated_scenario(rng), "batch #" + std::to_string(i + 1) + ": ");
        }
    }

    const Aggregator aggs[] = {Aggregator::Sum, Aggregator::Min, Aggregator::Product};
    for (AxiomVerdict& v : run_counterexample_fixtures(aggs)) {
        v.axiom = "fixture: " + v.axiom;
        verdicts.push_back(std::move(v));
    }

    bool ok = true;
    for (const AxiomVerdict& v : verdicts) {
        const bool is_fixture = v.axiom.rfind("fixture: ", 0) == 0;
        if (is_fixture ? !fixture_exhibits_violation(v) : !(v.holds || v.precondition_failure))
            ok = false;
    }

    if (cfg.format == "json") {
        Json j;
        j["verdicts"] = verdicts_json(verdicts);
        j["ok"] = ok;
        write_output(cfg, j.dump(2));
    } else {
        write_output(cfg, verdicts_text(verdicts));
    }
    return ok ? kExitOk : kExitVerificationFailure;
}

int run_oracle(const CommonConfig& cfg, std::uint32_t cap, bool all_alphas) {
    const auto files = expand_inputs(cfg.inputs);
    if (files.empty()) throw std::runtime_error("no input files");
    const Additivity k = parse_k(cfg.k_text);
    std::vector<Aggregator> aggs;
    if (all_alphas)
        aggs = {Aggregator::Sum, Aggregator::Min, Aggregator::Product};
    else
        aggs = {parse_alpha(cfg.alpha)};

    int exit_code = kExitOk;
    Json all = Json::array();
    std::ostringstream text;
    for (const fs::path& file : files) {
        const Scenario s = load_scenario(file, parse_policy(cfg.policy));
        if (s.projects.size() > cap)
            throw std::runtime_error(file.string() + ": n = " +
                                     std::to_string(s.projects.size()) +
                                     " exceeds the oracle cap " + std::to_string(cap));
        const SynergyModel model = build_model(s, k);
        for (Aggregator agg : aggs) {
            const SolveReport bb = branch_and_bound(model, s, agg, solve_options(cfg));
            const SolveReport bf = brute_force(model, s, agg);
            const bool equal = compare_scores(agg, bb.score, bf.score) == 0 &&
                               bb.bundle.mask == bf.bundle.mask;
            if (!equal) exit_code = kExitVerificationFailure;

            Json j;
            j["file"] = file.string();
            j["aggregator"] = aggregator_name(agg);
            j["equal"] = equal;
            j["branch_and_bound"] = solve_report_json(s, bb);
            j["brute_force"] = solve_report_json(s, bf);
            j["node_ratio"] =
                bf.nodes_explored == 0
                    ? 0.0
                    : static_cast<double>(bb.nodes_explored) /
                          static_cast<double>(bf.nodes_explored);
            all.push_back(std::move(j));
            text << file.string() << " [" << aggregator_name(agg) << "] "
                 << (equal ? "EQUAL" : "MISMATCH") << " score "
                 << to_fraction_string(bf.score.value) << " nodes " << bb.nodes_explored << "/"
                 << bf.nodes_explored << "\n";
        }
    }
    if (cfg.format == "json")
        write_output(cfg, (all.size() == 1 ? all[0] : all).dump(2));
    else
        write_output(cfg, text.str());
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"participatory budgeting with ballot-derived project synergies"};
    app.require_subcommand(1);

    CommonConfig cfg;
    std::uint32_t analyze_limit = 2;
    bool fixtures_only = false;
    bool corrupt = false;
    std::uint32_t batch_count = 20;
    std::uint32_t oracle_cap = 12;
    bool oracle_all = false;

    const auto add_common = [&](CLI::App* cmd, bool needs_input) {
        if (needs_input)
            cmd->add_option("inputs", cfg.inputs, ".pb files or directories")->required();
        else
            cmd->add_option("inputs", cfg.inputs, ".pb files or directories");
        cmd->add_option("--alpha", cfg.alpha, "aggregator: sum|min|prod")
            ->check(CLI::IsMember({"sum", "min", "prod"}));
        cmd->add_option("--k", cfg.k_text, "additivity bound (int >= 1 or 'unbounded')");
        cmd->add_option("--policy", cfg.policy, "knapsack policy: strict|drop|truncate")
            ->check(CLI::IsMember({"strict", "drop", "truncate"}));
        cmd->add_option("--format", cfg.format, "output format: json|csv|text")
            ->check(CLI::IsMember({"json", "csv", "text"}));
        cmd->add_option("--nodes", cfg.max_nodes, "node limit for the search");
        cmd->add_option("--timeout-ms", cfg.timeout_ms, "wall-clock limit for the search");
        cmd->add_option("--seed", cfg.seed, "seed for sampled checks");
        cmd->add_option("--threshold", cfg.threshold, "minimum |raw term| (rational)");
        cmd->add_option("--out", cfg.out_path, "write output to a file instead of stdout");
    };

    auto* solve = app.add_subcommand("solve", "compute the winning bundle");
    add_common(solve, true);
    auto* analyze = app.add_subcommand("analyze", "report project interactions");
    add_common(analyze, true);
    analyze->add_option("--limit", analyze_limit, "maximum interaction size (default 2)");
    auto* compare = app.add_subcommand("compare", "k=1 vs synergy-aware winners");
    add_common(compare, true);
    auto* stats = app.add_subcommand("stats", "cost deciles and budget utilization");
    add_common(stats, true);
    auto* axioms = app.add_subcommand("axioms", "run axiom checkers and fixtures");
    add_common(axioms, false);
    axioms->add_flag("--fixtures-only", fixtures_only, "run only the counterexample fixtures");
    axioms->add_flag("--corrupt", corrupt, "plant a corrupted transform (negative control)");
    axioms->add_option("--count", batch_count, "generated batch size when no input is given");
    auto* oracle = app.add_subcommand("oracle", "branch-and-bound vs brute force");
    add_common(oracle, true);
    oracle->add_option("--cap", oracle_cap, "maximum project count (default 12)");
    oracle->add_flag("--all-alphas", oracle_all, "run sum, min and prod");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;  // --help is code 0
    }

    try {
        if (solve->parsed()) return run_solve(cfg);
        if (analyze->parsed()) return run_analyze(cfg, analyze_limit);
        if (compare->parsed()) return run_compare(cfg);
        if (stats->parsed()) return run_stats(cfg);
        if (axioms->parsed()) return run_axioms(cfg, fixtures_only, corrupt, batch_count);
        if (oracle->parsed()) return run_oracle(cfg, oracle_cap, oracle_all);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
