#include "pbsyn/emit.hpp"

#include <sstream>

namespace pbsyn {

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ",";
        out += ids[i];
    }
    return out;
}

}  // namespace

double rational_to_double(const Rational& r) { return r.convert_to<double>(); }

std::string classification_name(InteractionClass c) {
    switch (c) {
        case InteractionClass::Positive: return "positive";
        case InteractionClass::Negative: return "negative";
        case InteractionClass::Independent: return "independent";
    }
    return "?";
}

Json k_to_json(Additivity k) {
    if (!k) return Json("unbounded");
    return Json(*k);
}

Json solve_report_json(const Scenario& scenario, const SolveReport& report) {
    Json j;
    j["bundle"] = subset_ids(scenario, report.bundle.mask);
    j["bundle_cost"] = report.bundle.cost;
    j["score"] = to_fraction_string(report.score.value);
    j["score_decimal"] = rational_to_double(report.score.value);
    if (report.aggregator == Aggregator::Product) j["zero_count"] = report.score.zeros;
    j["aggregator"] = aggregator_name(report.aggregator);
    j["k"] = k_to_json(report.k);
    j["nodes_explored"] = report.nodes_explored;
    j["nodes_pruned_bound"] = report.nodes_pruned_bound;
    j["nodes_pruned_budget"] = report.nodes_pruned_budget;
    j["bound_evals"] = report.bound_evals;
    j["wall_ms"] = report.wall_ms;
    j["optimal"] = report.optimal;
    return j;
}

std::string solve_report_csv_header() {
    return "file;aggregator;k;bundle;bundle_cost;score;score_decimal;zero_count;"
           "nodes_explored;nodes_pruned_bound;nodes_pruned_budget;bound_evals;wall_ms;optimal";
}

std::string solve_report_csv_row(const std::string& file, const Scenario& scenario,
                                 const SolveReport& report) {
    std::ostringstream out;
    out << file << ";" << aggregator_name(report.aggregator) << ";"
        << (report.k ? std::to_string(*report.k) : "unbounded") << ";"
        << join_ids(subset_ids(scenario, report.bundle.mask)) << ";" << report.bundle.cost << ";"
        << to_fraction_string(report.score.value) << ";"
        << to_decimal_string(report.score.value) << ";"
        << (report.aggregator == Aggregator::Product ? std::to_string(report.score.zeros) : "")
        << ";" << report.nodes_explored << ";" << report.nodes_pruned_bound << ";"
        << report.nodes_pruned_budget << ";" << report.bound_evals << ";" << report.wall_ms << ";"
        << (report.optimal ? "true" : "false");
    return out.str();
}

Json interaction_report_json(const Scenario& scenario,
                             const std::vector<InteractionRecord>& records) {
    Json arr = Json::array();
    for (const InteractionRecord& r : records) {
        Json j;
        j["subset"] = subset_ids(scenario, r.subset);
        j["cost"] = r.cost;
        j["rate"] = to_fraction_string(r.rate);
        j["rate_decimal"] = rational_to_double(r.rate);
        j["expected_rate"] = to_fraction_string(r.expected_rate);
        j["expected_rate_decimal"] = rational_to_double(r.expected_rate);
        j["raw_term"] = to_fraction_string(r.raw_term);
        j["raw_term_decimal"] = rational_to_double(r.raw_term);
        j["transform"] = to_fraction_string(r.transform);
        j["transform_decimal"] = rational_to_double(r.transform);
        j["classification"] = classification_name(r.classification);
        arr.push_back(std::move(j));
    }
    return arr;
}

std::string interaction_report_csv(const Scenario& scenario,
                                   const std::vector<InteractionRecord>& records) {
    std::ostringstream out;
    out << "subset;cost;rate;expected_rate;raw_term;transform;classification\n";
    for (const InteractionRecord& r : records) {
        out << join_ids(subset_ids(scenario, r.subset)) << ";" << r.cost << ";"
            << to_fraction_string(r.rate) << ";" << to_fraction_string(r.expected_rate) << ";"
            << to_fraction_string(r.raw_term) << ";" << to_fraction_string(r.transform) << ";"
            << classification_name(r.classification) << "\n";
    }
    return out.str();
}

Json verdict_json(const AxiomVerdict& verdict) {
    Json j;
    j["axiom"] = verdict.axiom;
    j["holds"] = verdict.holds;
    if (!verdict.holds) j["witness"] = verdict.witness;
    if (verdict.precondition_failure) j["precondition_failure"] = true;
    j["universe"] = verdict.universe;
    return j;
}

Json verdicts_json(const std::vector<AxiomVerdict>& verdicts) {
    Json arr = Json::array();
    for (const AxiomVerdict& v : verdicts) arr.push_back(verdict_json(v));
    return arr;
}

std::string verdicts_text(const std::vector<AxiomVerdict>& verdicts) {
    std::ostringstream out;
    for (const AxiomVerdict& v : verdicts) {
        const bool fixture = v.axiom.rfind("fixture: ", 0) == 0;
        const char* marker;
        if (fixture) {
            // fixtures are expected to exhibit the violation
            marker = v.precondition_failure ? "[ skip ] "
                     : v.holds              ? "[ BAD  ] "
                                            : "[ viol ] ";
        } else {
            marker = v.holds                  ? "[ pass ] "
                     : v.precondition_failure ? "[ skip ] "
                                              : "[ FAIL ] ";
        }
        out << marker << v.axiom;
        if (!v.universe.empty()) out << "  (" << v.universe << ")";
        out << "\n";
        if (!v.holds && !v.witness.empty()) out << "         " << v.witness << "\n";
    }
    return out.str();
}

Json stats_json(const InstanceStats& stats) {
    Json j;
    j["file"] = stats.file;
    Json deciles = Json::array();
    Json deciles_exact = Json::array();
    for (const Rational& d : stats.deciles) {
        deciles.push_back(rational_to_double(d));
        deciles_exact.push_back(to_fraction_string(d));
    }
    j["cost_deciles"] = std::move(deciles);
    j["cost_deciles_exact"] = std::move(deciles_exact);
    j["utilization_mean"] = to_fraction_string(stats.utilization.mean);
    j["utilization_mean_decimal"] = rational_to_double(stats.utilization.mean);
    j["utilization_median"] = to_fraction_string(stats.utilization.median);
    j["utilization_median_decimal"] = rational_to_double(stats.utilization.median);
    return j;
}

std::string stats_csv_header() {
    std::string h = "file";
    for (int i = 1; i <= 10; ++i) h += ";d" + std::to_string(i);
    return h + ";utilization_mean;utilization_median";
}

std::string stats_csv_row(const InstanceStats& stats) {
    std::ostringstream out;
    out << stats.file;
    for (const Rational& d : stats.deciles) out << ";" << to_decimal_string(d, 4);
    out << ";" << to_decimal_string(stats.utilization.mean, 4) << ";"
        << to_decimal_string(stats.utilization.median, 4);
    return out.str();
}

Json comparison_json(const std::string& file, const Scenario& scenario,
                     const ComparisonRecord& record) {
    Json j;
    j["file"] = file;
    j["differs"] = record.differs;
    j["reallocation"] = to_fraction_string(record.reallocation);
    j["reallocation_decimal"] = rational_to_double(record.reallocation);
    j["winner_k1"] = subset_ids(scenario, record.winner_linear.mask);
    j["winner_k"] = subset_ids(scenario, record.winner_synergy.mask);
    return j;
}

std::string comparison_csv_header() {
    return "file;differs;reallocation;winner_k1;winner_k";
}

std::string comparison_csv_row(const std::string& file, const Scenario& scenario,
                               const ComparisonRecord& record) {
    std::ostringstream out;
    out << file << ";" << (record.differs ? "true" : "false") << ";"
        << to_fraction_string(record.reallocation) << ";"
        << join_ids(subset_ids(scenario, record.winner_linear.mask)) << ";"
        << join_ids(subset_ids(scenario, record.winner_synergy.mask));
    return out.str();
}

}  // namespace pbsyn
