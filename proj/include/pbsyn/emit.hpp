#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pbsyn/axioms.hpp"
#include "pbsyn/scenario.hpp"
#include "pbsyn/solver.hpp"
#include "pbsyn/synergy.hpp"

namespace pbsyn {

using Json = nlohmann::ordered_json;

double rational_to_double(const Rational& r);
std::string classification_name(InteractionClass c);
Json k_to_json(Additivity k);

Json solve_report_json(const Scenario& scenario, const SolveReport& report);
std::string solve_report_csv_header();
std::string solve_report_csv_row(const std::string& file, const Scenario& scenario,
                                 const SolveReport& report);

Json interaction_report_json(const Scenario& scenario,
                             const std::vector<InteractionRecord>& records);
std::string interaction_report_csv(const Scenario& scenario,
                                   const std::vector<InteractionRecord>& records);

Json verdict_json(const AxiomVerdict& verdict);
Json verdicts_json(const std::vector<AxiomVerdict>& verdicts);
std::string verdicts_text(const std::vector<AxiomVerdict>& verdicts);

struct InstanceStats {
    std::string file;
    std::array<Rational, 10> deciles{};
    BudgetUtilization utilization;
};
Json stats_json(const InstanceStats& stats);
std::string stats_csv_header();
std::string stats_csv_row(const InstanceStats& stats);

Json comparison_json(const std::string& file, const Scenario& scenario,
                     const ComparisonRecord& record);
std::string comparison_csv_header();
std::string comparison_csv_row(const std::string& file, const Scenario& scenario,
                               const ComparisonRecord& record);

}  // namespace pbsyn
