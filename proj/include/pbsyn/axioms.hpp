#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pbsyn/scenario.hpp"
#include "pbsyn/solver.hpp"
#include "pbsyn/synergy.hpp"

namespace pbsyn {

struct AxiomVerdict {
    std::string axiom;
    bool holds = false;
    bool precondition_failure = false;  // guard tripped; holds stays false
    std::string witness;                // non-empty iff !holds
    std::string universe;               // what was checked (exhaustive vs sampled)
};

/// u_M({a}) == cost(a) for every project (normalization constant 1).
AxiomVerdict check_cost_consistency(const SynergyModel& model, const Scenario& scenario);

/// u_M(S \ {a}) <= u_M(S) over all ballot-contained subsets up to max_size,
/// plus seeded random subsets of the full project set. Exact comparisons.
AxiomVerdict check_superset_monotonicity(const SynergyModel& model, const Scenario& scenario,
                                         std::uint32_t max_size,
                                         std::uint32_t random_samples = 1000,
                                         std::uint64_t seed = 0);

/// Positive: block-approved subsets satisfy u_M(S) >= sum of costs, strictly
/// when k >= 2 and some voter misses S. Negative: subsets never co-approved
/// pairwise satisfy u_M(S) <= sum of costs. (At k = 1 u_M is the subset cost,
/// so only the non-strict clauses can apply.)
std::pair<AxiomVerdict, AxiomVerdict> check_synergy_effects(const SynergyModel& model,
                                                            const Scenario& scenario);

/// Builds E' replacing voters (i, j) by one voter approving exactly S and one
/// approving (A_i u A_j) \ S, then compares u_M(S, E) against u_M(S, E'):
/// strict increase for k >= 2, equality at k = 1 where u_M carries no
/// interaction terms. Precondition failures produce an error verdict.
AxiomVerdict check_regrouping_monotonicity(const Scenario& scenario, Additivity k,
                                           ProjectMask subset, std::size_t voter_i,
                                           std::size_t voter_j);

/// A qualifying (S = {a,b}, v_i, v_j) triple for the regrouping axiom with a
/// raw-bound transform (the floor of the transform stays inactive after the
/// regrouping, so the strict increase is actually exercised).
struct RegroupingCandidate {
    ProjectMask subset = 0;
    std::size_t voter_i = 0;
    std::size_t voter_j = 0;
};
std::optional<RegroupingCandidate> find_regrouping_candidate(const Scenario& scenario);

/// Swaps the approvals of two equal-cost projects and verifies the utility
/// bijection u_M(S, E) == u_M(S_swap, E_swap) over ballot-contained subsets.
AxiomVerdict check_cost_aware_neutrality(const Scenario& scenario, Additivity k,
                                         std::uint32_t project_i, std::uint32_t project_j);

/// The returned bundle admits no affordable addition.
AxiomVerdict check_inclusion_maximality(const SynergyModel& model, const Scenario& scenario,
                                        Aggregator agg, const SolveOptions& options = {});

/// Splits a funded project into parts approved by the same voters and checks
/// that the new winner intersects the parts.
AxiomVerdict check_splitting_monotonicity(const Scenario& scenario, Additivity k, Aggregator agg,
                                          std::uint32_t project,
                                          std::span<const std::int64_t> part_costs);

/// Counterexample fixtures extracted from the impossibility proofs: each run
/// solves the instance before and after the perturbation (brute-force oracle,
/// u_M at k = 2) and reports the violated axiom. holds == false is the
/// expected outcome; holds == true means the fixture failed to exhibit it.
Scenario discount_fixture_before();
Scenario discount_fixture_after();
std::pair<Scenario, Scenario> limit_fixture(Aggregator agg);  // budget l, then l+1
std::pair<Scenario, Scenario> merging_fixture();              // self-validating (7 vs 8 voters)

std::vector<AxiomVerdict> run_counterexample_fixtures(std::span<const Aggregator> aggs);

inline bool fixture_exhibits_violation(const AxiomVerdict& v) {
    return !v.holds && !v.precondition_failure;
}

}  // namespace pbsyn
