#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pbsyn/rational.hpp"
#include "pbsyn/scenario.hpp"
#include "pbsyn/subsets.hpp"
#include "pbsyn/synergy.hpp"

namespace pbsyn {

enum class Aggregator { Sum, Min, Product };

std::string aggregator_name(Aggregator agg);
std::optional<Aggregator> aggregator_from_name(const std::string& name);

/// Aggregate score. Sum/Min carry the value directly. Product carries the
/// count of zero satisfactions plus the product of the positive ones; fewer
/// zeros is strictly better, equal zeros compare by the positive part.
struct Score {
    Rational value = 0;
    std::uint32_t zeros = 0;
};

/// >0 if a is better than b, 0 if equal, <0 if worse.
int compare_scores(Aggregator agg, const Score& a, const Score& b);

struct Bundle {
    ProjectMask mask = 0;
    std::int64_t cost = 0;

    bool operator==(const Bundle&) const = default;
};

Bundle make_bundle(const Scenario& scenario, ProjectMask mask);

/// Lexicographic order on the sorted member-id lists (shared tie-breaking).
bool bundle_lex_less(const Scenario& scenario, ProjectMask a, ProjectMask b);

/// Search node: decided prefix split into included and banned, everything
/// else undecided; remaining = budget - cost(included).
struct SearchNode {
    ProjectMask included = 0;
    ProjectMask banned = 0;
    std::int64_t remaining = 0;
};

enum class RelaxationOrder { Density, RawValue };

struct NodeAudit {
    SearchNode node;
    Score bound;
};

struct SolveOptions {
    std::optional<std::uint64_t> max_nodes;
    std::optional<std::int64_t> max_millis;
    bool apply_exhaustive_fill = true;  // test hook for the maximality control
    RelaxationOrder relaxation_order = RelaxationOrder::Density;
    std::function<void(const NodeAudit&)> bound_audit;  // test-only observer
};

struct SolveReport {
    Bundle bundle;
    Score score;
    Aggregator aggregator = Aggregator::Sum;
    Additivity k;
    std::uint64_t nodes_explored = 0;
    std::uint64_t nodes_pruned_bound = 0;
    std::uint64_t nodes_pruned_budget = 0;
    std::uint64_t bound_evals = 0;
    std::int64_t wall_micros = 0;
    std::int64_t wall_ms = 0;
    bool optimal = false;
};

/// Satisfaction of one voter: u_M(ballot intersect bundle).
Rational satisfaction(const SynergyModel& model, const Scenario& scenario, std::size_t voter,
                      ProjectMask bundle);

Score aggregate(const SynergyModel& model, const Scenario& scenario, ProjectMask bundle,
                Aggregator agg);

/// Projects by decreasing approval count, ties by id; also the branch order.
std::vector<std::uint32_t> approval_order(const Scenario& scenario);
std::vector<std::uint32_t> approval_counts(const Scenario& scenario);

/// Scan approval_order, funding every project that fits the remaining budget.
Bundle greedy_by_approvals(const Scenario& scenario);

/// Repeatedly fund the affordable project approved by the most least-satisfied
/// voters (ties: overall approvals, then id); once none of them approves any
/// affordable project, falls back to the approval-order scan.
Bundle greedy_min_prod(const SynergyModel& model, const Scenario& scenario, Aggregator agg);

/// cost(a) + sum of m(C)/|C| over positive ballot-contained C containing a
/// with |C| <= k and cost(C) <= budget. Valid as an apportioned bound:
/// u_M(X) <= sum of caps over members of X for every ballot-contained X.
Rational per_project_utility_cap(const SynergyModel& model, const Scenario& scenario,
                                 std::uint32_t project);

/// Admissible Sum bound: exact score of the included set plus a Dantzig
/// relaxation over undecided projects, each valued at approvers(a) times its
/// positive-transform margin (undivided; see per_project_utility_cap note).
Score upper_bound_sum(const SynergyModel& model, const Scenario& scenario, const SearchNode& node,
                      RelaxationOrder order = RelaxationOrder::Density);

/// Admissible Min/Product bound: each voter optimistically receives her
/// approved projects among included plus individually affordable undecided.
Score upper_bound_min_prod(const SynergyModel& model, const Scenario& scenario,
                           const SearchNode& node, Aggregator agg);

/// Exact depth-first branch-and-bound over the include/ban decision tree.
SolveReport branch_and_bound(const SynergyModel& model, const Scenario& scenario, Aggregator agg,
                             const SolveOptions& options = {});

/// Full enumeration oracle (n <= 20) with the same tie-breaking.
SolveReport brute_force(const SynergyModel& model, const Scenario& scenario, Aggregator agg);

/// Adds non-members by approval order while they fit; result is exhaustive.
Bundle exhaustive_fill(const Scenario& scenario, const Bundle& bundle);

struct ComparisonRecord {
    Bundle winner_linear;   // k = 1 (overlap utility)
    Bundle winner_synergy;  // configured k
    bool differs = false;
    Rational reallocation;  // cost(symmetric difference) / (2*budget)
};

ComparisonRecord compare_with_linear(const Scenario& scenario, Aggregator agg, Additivity k,
                                     const SolveOptions& options = {});

}  // namespace pbsyn
