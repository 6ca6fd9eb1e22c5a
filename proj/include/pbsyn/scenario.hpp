#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pbsyn/rational.hpp"
#include "pbsyn/subsets.hpp"

namespace pbsyn {

struct Project {
    std::string id;
    std::string label;  // Pabulib "name" column
    std::int64_t cost = 0;
    std::map<std::string, std::string> extra;  // unknown PROJECTS columns, verbatim

    bool operator==(const Project&) const = default;
};

struct Ballot {
    std::string voter_id;
    std::vector<std::uint32_t> approvals;  // project indices, file order, no duplicates
    ProjectMask mask = 0;
    std::map<std::string, std::string> extra;  // unknown VOTES columns

    bool operator==(const Ballot&) const = default;
};

/// The budgeting scenario E = (projects, ballots, costs, budget). parse_pabulib
/// yields a raw (structurally checked) scenario; validate() enforces the
/// knapsack constraint and the model invariants. Downstream modules expect
/// validated scenarios only.
struct Scenario {
    std::vector<Project> projects;
    std::vector<Ballot> ballots;
    std::int64_t budget = 0;
    std::map<std::string, std::string> meta;  // META rows incl. budget, key-normalized

    // parse-time warnings (duplicate approvals etc.); not part of the value
    std::vector<std::string> warnings;

    std::size_t project_count() const { return projects.size(); }
    std::size_t voter_count() const { return ballots.size(); }

    std::optional<std::uint32_t> index_of(const std::string& project_id) const;

    ProjectMask all_projects_mask() const {
        return projects.size() >= 64 ? ~ProjectMask{0}
                                     : (ProjectMask{1} << projects.size()) - 1;
    }

    bool operator==(const Scenario& other) const {
        return projects == other.projects && ballots == other.ballots &&
               budget == other.budget && meta == other.meta;
    }
};

enum class ValidationPolicy { Strict, Drop, Truncate };

struct ValidationReport {
    ValidationPolicy policy = ValidationPolicy::Drop;
    std::uint32_t dropped_ballots = 0;
    std::uint32_t truncated_ballots = 0;
    std::vector<std::string> unaffordable_projects;  // cost > budget, kept but flagged
    std::vector<std::string> warnings;
};

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what), line(line_) {}
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Pabulib-style ".pb" document -> raw scenario. Checks structure, integer
/// costs/budget, unique project ids and referential integrity of votes;
/// duplicate ids inside one vote are dropped with a warning.
Scenario parse_pabulib(const std::string& text);

/// Scenario -> ".pb" document. Sections in META, PROJECTS, VOTES order,
/// required columns first, remaining columns sorted; meta keys sorted.
/// parse_pabulib(serialize_pabulib(s)) == s for any validated s.
std::string serialize_pabulib(const Scenario& scenario);

/// Enforces the per-ballot knapsack constraint cost(A_i) <= budget.
/// Strict: throw on any violating ballot. Drop: remove violators.
/// Truncate: keep the longest prefix of the listed approvals that fits.
Scenario validate(const Scenario& raw, ValidationPolicy policy, ValidationReport* report = nullptr);

std::int64_t subset_cost(const Scenario& scenario, ProjectMask subset);

/// Resolves project ids to a mask; throws std::out_of_range on unknown ids.
ProjectMask resolve_subset(const Scenario& scenario, std::span<const std::string> ids);

std::vector<std::string> subset_ids(const Scenario& scenario, ProjectMask subset);

/// Entry j holds the fraction of projects with cost in ((j*l)/10, ((j+1)*l)/10],
/// bin index ceil(10*cost/l) clamped to [1,10]. Entries sum to 1 when n >= 1.
std::array<Rational, 10> cost_decile_vector(const Scenario& scenario);

/// Mean and median over ballots of cost(A_i)/budget.
struct BudgetUtilization {
    Rational mean;
    Rational median;
};
BudgetUtilization budget_utilization(const Scenario& scenario);

/// Hash binding models/results to the numeric content of a scenario
/// (costs, budget, ballot masks; ids and labels do not participate).
std::uint64_t scenario_fingerprint(const Scenario& scenario);

}  // namespace pbsyn
