#include "pbsyn/axioms.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <unordered_set>

namespace pbsyn {

namespace {

std::string subset_label(const Scenario& scenario, ProjectMask subset) {
    const auto ids = subset_ids(scenario, subset);
    std::string out = "{";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ",";
        out += ids[i];
    }
    return out + "}";
}

std::uint32_t effective_k(const SynergyModel& model, std::uint32_t fallback = 6) {
    const Additivity k = model.additivity();
    return k ? *k : fallback;
}

Scenario make_scenario(std::int64_t budget,
                       std::initializer_list<std::pair<const char*, std::int64_t>> projects,
                       std::initializer_list<std::pair<const char*, std::vector<const char*>>> ballots) {
    Scenario s;
    s.budget = budget;
    s.meta["budget"] = std::to_string(budget);
    for (const auto& [id, cost] : projects) s.projects.push_back(Project{id, "", cost, {}});
    for (const auto& [voter, ids] : ballots) {
        Ballot b;
        b.voter_id = voter;
        for (const char* id : ids) {
            const auto idx = s.index_of(id);
            b.approvals.push_back(*idx);
            b.mask |= mask_bit(*idx);
        }
        s.ballots.push_back(std::move(b));
    }
    return validate(s, ValidationPolicy::Strict);
}

}  // namespace

AxiomVerdict check_cost_consistency(const SynergyModel& model, const Scenario& scenario) {
    AxiomVerdict v;
    v.axiom = "cost consistency";
    v.universe = "all " + std::to_string(scenario.projects.size()) + " singletons, exact";
    for (std::uint32_t i = 0; i < scenario.projects.size(); ++i) {
        const Rational u = utility_um(model, scenario, mask_bit(i));
        if (u != scenario.projects[i].cost) {
            v.witness = "u_M({" + scenario.projects[i].id + "}) = " + to_fraction_string(u) +
                        " != cost " + std::to_string(scenario.projects[i].cost);
            return v;
        }
    }
    v.holds = true;
    return v;
}

AxiomVerdict check_superset_monotonicity(const SynergyModel& model, const Scenario& scenario,
                                         std::uint32_t max_size, std::uint32_t random_samples,
                                         std::uint64_t seed) {
    AxiomVerdict v;
    v.axiom = "super-set monotonicity";

    std::unordered_set<ProjectMask> universe;
    for (const Ballot& b : scenario.ballots)
        for_each_subset_sized(b.mask, 2, max_size, [&](ProjectMask s) { universe.insert(s); });
    const std::size_t exhaustive = universe.size();

    std::mt19937_64 rng(seed);
    const ProjectMask all = scenario.all_projects_mask();
    const std::uint32_t n = static_cast<std::uint32_t>(scenario.projects.size());
    for (std::uint32_t i = 0; i < random_samples && n >= 2; ++i) {
        const std::uint32_t size =
            2 + static_cast<std::uint32_t>(rng() % std::max<std::uint32_t>(1, std::min(max_size, n) - 1));
        ProjectMask s = 0;
        while (mask_size(s) < size) s |= mask_bit(static_cast<std::uint32_t>(rng() % n));
        if (mask_subset_of(s, all)) universe.insert(s);
    }

    std::vector<ProjectMask> ordered(universe.begin(), universe.end());
    std::sort(ordered.begin(), ordered.end());
    for (ProjectMask s : ordered) {
        const Rational us = model.utility(s);
        bool bad = false;
        std::uint32_t bad_member = 0;
        for_each_member(s, [&](std::uint32_t a) {
            if (bad) return;
            if (model.utility(s & ~mask_bit(a)) > us) {
                bad = true;
                bad_member = a;
            }
        });
        if (bad) {
            v.witness = "u_M(" + subset_label(scenario, s) + " \\ {" +
                        scenario.projects[bad_member].id + "}) > u_M(" + subset_label(scenario, s) + ")";
            v.universe = std::to_string(exhaustive) + " ballot-contained subsets (size <= " +
                         std::to_string(max_size) + ") + " + std::to_string(random_samples) +
                         " sampled";
            return v;
        }
    }
    v.holds = true;
    v.universe = std::to_string(exhaustive) + " ballot-contained subsets (size <= " +
                 std::to_string(max_size) + ") + " + std::to_string(random_samples) + " sampled";
    return v;
}

std::pair<AxiomVerdict, AxiomVerdict> check_synergy_effects(const SynergyModel& model,
                                                            const Scenario& scenario) {
    const std::uint32_t hi = std::min<std::uint32_t>(effective_k(model), 6);
    const bool strict_possible = !model.additivity() || *model.additivity() >= 2;

    AxiomVerdict pos;
    pos.axiom = "effect of positive synergies";
    pos.holds = true;
    AxiomVerdict neg;
    neg.axiom = "effect of negative synergies";
    neg.holds = true;

    std::size_t pos_checked = 0, neg_checked = 0;

    // positive: block-approved subsets are necessarily ballot-contained
    std::unordered_set<ProjectMask> blocks;
    for (const Ballot& b : scenario.ballots)
        for_each_subset_sized(b.mask, 2, hi, [&](ProjectMask s) { blocks.insert(s); });
    std::vector<ProjectMask> ordered(blocks.begin(), blocks.end());
    std::sort(ordered.begin(), ordered.end());
    for (ProjectMask s : ordered) {
        bool block = true, approved = false, missed = false;
        for (const Ballot& b : scenario.ballots) {
            if (mask_subset_of(s, b.mask)) {
                approved = true;
            } else if ((s & b.mask) != 0) {
                block = false;
                break;
            } else {
                missed = true;
            }
        }
        if (!block || !approved) continue;
        ++pos_checked;
        const Rational u = model.utility(s);
        const Rational costs = model.subset_cost(s);
        const bool want_strict = strict_possible && missed;
        if (pos.holds && (u < costs || (want_strict && u == costs))) {
            pos.holds = false;
            pos.witness = "block " + subset_label(scenario, s) + ": u_M = " + to_fraction_string(u) +
                          (want_strict ? " not > " : " < ") + to_fraction_string(costs);
        }
    }

    // negative: every voter approves at most one member of S
    for_each_subset_sized(scenario.all_projects_mask(), 2, hi, [&](ProjectMask s) {
        for (const Ballot& b : scenario.ballots)
            if (mask_size(s & b.mask) > 1) return;
        ++neg_checked;
        const Rational u = model.utility(s);
        const Rational costs = model.subset_cost(s);
        if (neg.holds && u > costs) {
            neg.holds = false;
            neg.witness = "spread " + subset_label(scenario, s) + ": u_M = " + to_fraction_string(u) +
                          " > " + to_fraction_string(costs);
        }
    });

    pos.universe = std::to_string(pos_checked) + " block-approved subsets (size <= " +
                   std::to_string(hi) + (strict_possible ? ", strict clause active)" : ", k=1 non-strict)");
    neg.universe = std::to_string(neg_checked) + " pairwise-unshared subsets (size <= " +
                   std::to_string(hi) + ")";
    return {std::move(pos), std::move(neg)};
}

AxiomVerdict check_regrouping_monotonicity(const Scenario& scenario, Additivity k,
                                           ProjectMask subset, std::size_t voter_i,
                                           std::size_t voter_j) {
    AxiomVerdict v;
    v.axiom = "regrouping monotonicity";
    auto fail_pre = [&](const std::string& why) {
        v.precondition_failure = true;
        v.witness = "precondition: " + why;
        return v;
    };

    if (voter_i >= scenario.ballots.size() || voter_j >= scenario.ballots.size() ||
        voter_i == voter_j)
        return fail_pre("voter pair out of range");
    const ProjectMask ai = scenario.ballots[voter_i].mask;
    const ProjectMask aj = scenario.ballots[voter_j].mask;
    if ((ai & aj) != 0) return fail_pre("ballots overlap");
    if (!mask_subset_of(subset, ai | aj)) return fail_pre("S not within the two ballots");
    if (mask_subset_of(subset, ai) || mask_subset_of(subset, aj))
        return fail_pre("S already contained in one ballot");
    if (subset_cost(scenario, subset) > scenario.budget) return fail_pre("cost(S) > budget");
    const ProjectMask residual = (ai | aj) & ~subset;
    if (subset_cost(scenario, residual) > scenario.budget)
        return fail_pre("residual ballot unaffordable");

    Scenario regrouped = scenario;
    regrouped.warnings.clear();
    const std::size_t hi_idx = std::max(voter_i, voter_j);
    const std::size_t lo_idx = std::min(voter_i, voter_j);
    regrouped.ballots.erase(regrouped.ballots.begin() + hi_idx);
    regrouped.ballots.erase(regrouped.ballots.begin() + lo_idx);
    Ballot grouped;
    grouped.voter_id = "regrouped_block";
    grouped.mask = subset;
    grouped.approvals = mask_members(subset);
    Ballot rest;
    rest.voter_id = "regrouped_rest";
    rest.mask = residual;
    rest.approvals = mask_members(residual);
    regrouped.ballots.push_back(std::move(grouped));
    regrouped.ballots.push_back(std::move(rest));

    const SynergyModel before = build_model(scenario, k);
    const SynergyModel after = build_model(regrouped, k);
    const Rational u_before = before.utility(subset);
    const Rational u_after = after.utility(subset);

    const bool interactions = !k || *k >= 2;
    v.universe = "S = " + subset_label(scenario, subset) + ", voters (" +
                 scenario.ballots[voter_i].voter_id + ", " + scenario.ballots[voter_j].voter_id +
                 ")" + (interactions ? ", strict" : ", k=1 equality form");
    if (interactions ? (u_before < u_after) : (u_before == u_after)) {
        v.holds = true;
    } else {
        v.witness = "u_M(S,E) = " + to_fraction_string(u_before) + ", u_M(S,E') = " +
                    to_fraction_string(u_after);
    }
    return v;
}

std::optional<RegroupingCandidate> find_regrouping_candidate(const Scenario& scenario) {
    const auto v = static_cast<std::int64_t>(scenario.ballots.size());
    std::optional<RegroupingCandidate> best;
    Rational best_margin;  // raw'(S) - floor(S); want it positive and maximal

    for (std::size_t i = 0; i < scenario.ballots.size(); ++i) {
        for (std::size_t j = i + 1; j < scenario.ballots.size(); ++j) {
            const ProjectMask ai = scenario.ballots[i].mask;
            const ProjectMask aj = scenario.ballots[j].mask;
            if (ai == 0 || aj == 0 || (ai & aj) != 0) continue;
            for_each_member(ai, [&](std::uint32_t a) {
                for_each_member(aj, [&](std::uint32_t b) {
                    const ProjectMask s = mask_bit(a) | mask_bit(b);
                    const std::int64_t ca = scenario.projects[a].cost;
                    const std::int64_t cb = scenario.projects[b].cost;
                    if (ca + cb > scenario.budget) return;
                    if (subset_cost(scenario, (ai | aj) & ~s) > scenario.budget) return;
                    // transform must stay raw-bound after regrouping:
                    // (r(S) + 1/v - r(a) r(b)) * cost(S) > -min(cost)
                    const Rational raw_after =
                        (appearance_rate(scenario, s) + Rational(1, v) -
                         appearance_rate(scenario, mask_bit(a)) *
                             appearance_rate(scenario, mask_bit(b))) *
                        (ca + cb);
                    const Rational margin = raw_after + std::min(ca, cb);
                    if (margin <= 0) return;
                    if (!best || margin > best_margin) {
                        best = RegroupingCandidate{s, i, j};
                        best_margin = margin;
                    }
                });
            });
        }
    }
    return best;
}

AxiomVerdict check_cost_aware_neutrality(const Scenario& scenario, Additivity k,
                                         std::uint32_t project_i, std::uint32_t project_j) {
    AxiomVerdict v;
    v.axiom = "cost-aware neutrality";
    if (project_i >= scenario.projects.size() || project_j >= scenario.projects.size()) {
        v.precondition_failure = true;
        v.witness = "precondition: project index out of range";
        return v;
    }
    if (scenario.projects[project_i].cost != scenario.projects[project_j].cost) {
        v.precondition_failure = true;
        v.witness = "precondition: costs differ (" +
                    std::to_string(scenario.projects[project_i].cost) + " vs " +
                    std::to_string(scenario.projects[project_j].cost) + ")";
        return v;
    }

    const auto swap_mask = [&](ProjectMask m) {
        const bool has_i = mask_contains(m, project_i);
        const bool has_j = mask_contains(m, project_j);
        if (has_i == has_j) return m;
        return m ^ (mask_bit(project_i) | mask_bit(project_j));
    };

    Scenario swapped = scenario;
    swapped.warnings.clear();
    for (Ballot& b : swapped.ballots) {
        b.mask = swap_mask(b.mask);
        for (std::uint32_t& idx : b.approvals) {
            if (idx == project_i)
                idx = project_j;
            else if (idx == project_j)
                idx = project_i;
        }
    }

    const SynergyModel base = build_model(scenario, k);
    const SynergyModel swapped_model = build_model(swapped, k);

    const std::uint32_t hi = std::min<std::uint32_t>(k ? *k : 6, 6);
    std::unordered_set<ProjectMask> universe;
    for (const Ballot& b : scenario.ballots)
        for_each_subset_sized(b.mask, 1, std::max<std::uint32_t>(hi, 1),
                              [&](ProjectMask s) { universe.insert(s); });

    std::vector<ProjectMask> ordered(universe.begin(), universe.end());
    std::sort(ordered.begin(), ordered.end());
    for (ProjectMask s : ordered) {
        const Rational lhs = base.utility(s);
        const Rational rhs = swapped_model.utility(swap_mask(s));
        if (lhs != rhs) {
            v.witness = "u_M(" + subset_label(scenario, s) + ",E) = " + to_fraction_string(lhs) +
                        " != u_M(swap,E_swap) = " + to_fraction_string(rhs);
            v.universe = std::to_string(ordered.size()) + " ballot-contained subsets";
            return v;
        }
    }
    v.holds = true;
    v.universe = std::to_string(ordered.size()) + " ballot-contained subsets, swap (" +
                 scenario.projects[project_i].id + " <-> " + scenario.projects[project_j].id + ")";
    return v;
}

AxiomVerdict check_inclusion_maximality(const SynergyModel& model, const Scenario& scenario,
                                        Aggregator agg, const SolveOptions& options) {
    AxiomVerdict v;
    v.axiom = "inclusion maximality";
    const SolveReport report = branch_and_bound(model, scenario, agg, options);
    const std::int64_t residual = scenario.budget - report.bundle.cost;
    for (std::uint32_t a = 0; a < scenario.projects.size(); ++a) {
        if (mask_contains(report.bundle.mask, a)) continue;
        if (scenario.projects[a].cost <= residual) {
            v.witness = "winner " + subset_label(scenario, report.bundle.mask) + " leaves room for " +
                        scenario.projects[a].id;
            v.universe = aggregator_name(agg) + " winner, residual " + std::to_string(residual);
            return v;
        }
    }
    v.holds = true;
    v.universe = aggregator_name(agg) + " winner " + subset_label(scenario, report.bundle.mask) +
                 ", residual " + std::to_string(residual);
    return v;
}

AxiomVerdict check_splitting_monotonicity(const Scenario& scenario, Additivity k, Aggregator agg,
                                          std::uint32_t project,
                                          std::span<const std::int64_t> part_costs) {
    AxiomVerdict v;
    v.axiom = "splitting monotonicity";
    auto fail_pre = [&](const std::string& why) {
        v.precondition_failure = true;
        v.witness = "precondition: " + why;
        return v;
    };
    if (project >= scenario.projects.size()) return fail_pre("project index out of range");
    if (part_costs.empty()) return fail_pre("no parts");
    std::int64_t total = 0;
    for (std::int64_t c : part_costs) {
        if (c < 1) return fail_pre("part cost < 1");
        total += c;
    }
    if (total != scenario.projects[project].cost)
        return fail_pre("parts sum to " + std::to_string(total) + ", project costs " +
                        std::to_string(scenario.projects[project].cost));

    const auto solve = [&](const Scenario& s, const SynergyModel& m) {
        return s.projects.size() <= kUnboundedEnumerationCap ? brute_force(m, s, agg)
                                                             : branch_and_bound(m, s, agg);
    };

    const SynergyModel base = build_model(scenario, k);
    const SolveReport before = solve(scenario, base);
    if (!mask_contains(before.bundle.mask, project))
        return fail_pre("project " + scenario.projects[project].id + " is not in the winner " +
                        subset_label(scenario, before.bundle.mask));

    // E': drop the project, append the parts, approvers approve every part
    Scenario split;
    split.budget = scenario.budget;
    split.meta = scenario.meta;
    std::vector<std::uint32_t> remap(scenario.projects.size(), 0);
    for (std::uint32_t i = 0; i < scenario.projects.size(); ++i) {
        if (i == project) continue;
        remap[i] = static_cast<std::uint32_t>(split.projects.size());
        split.projects.push_back(scenario.projects[i]);
    }
    ProjectMask parts_mask = 0;
    for (std::size_t p = 0; p < part_costs.size(); ++p) {
        Project part;
        part.id = scenario.projects[project].id + "_part" + std::to_string(p + 1);
        part.cost = part_costs[p];
        parts_mask |= mask_bit(static_cast<std::uint32_t>(split.projects.size()));
        split.projects.push_back(std::move(part));
    }
    for (const Ballot& b : scenario.ballots) {
        Ballot nb;
        nb.voter_id = b.voter_id;
        for (std::uint32_t idx : b.approvals) {
            if (idx == project) {
                for_each_member(parts_mask, [&](std::uint32_t pm) {
                    nb.approvals.push_back(pm);
                    nb.mask |= mask_bit(pm);
                });
            } else {
                nb.approvals.push_back(remap[idx]);
                nb.mask |= mask_bit(remap[idx]);
            }
        }
        split.ballots.push_back(std::move(nb));
    }
    split = validate(split, ValidationPolicy::Strict);

    const SynergyModel split_model = build_model(split, k);
    const SolveReport after = solve(split, split_model);
    v.universe = aggregator_name(agg) + ", " + scenario.projects[project].id + " -> " +
                 std::to_string(part_costs.size()) + " parts";
    if ((after.bundle.mask & parts_mask) != 0) {
        v.holds = true;
    } else {
        v.witness = "winner " + subset_label(split, after.bundle.mask) + " contains no part of " +
                    scenario.projects[project].id;
    }
    return v;
}

Scenario discount_fixture_before() {
    return make_scenario(8, {{"x1", 4}, {"x2", 3}, {"y", 4}},
                         {{"v1", {"x1", "x2"}}, {"v2", {"y"}}});
}

Scenario discount_fixture_after() {
    return make_scenario(8, {{"x1", 2}, {"x2", 3}, {"y", 4}},
                         {{"v1", {"x1", "x2"}}, {"v2", {"y"}}});
}

std::pair<Scenario, Scenario> limit_fixture(Aggregator agg) {
    if (agg == Aggregator::Sum) {
        return {make_scenario(6, {{"x1", 2}, {"x2", 5}, {"x3", 6}},
                              {{"v1", {"x1"}}, {"v2", {"x2"}}, {"v3", {"x3"}}}),
                make_scenario(7, {{"x1", 2}, {"x2", 5}, {"x3", 6}},
                              {{"v1", {"x1"}}, {"v2", {"x2"}}, {"v3", {"x3"}}})};
    }
    return {make_scenario(4, {{"x1", 1}, {"x2", 2}, {"x3", 3}},
                          {{"v1", {"x1", "x2"}}, {"v2", {"x3"}}}),
            make_scenario(5, {{"x1", 1}, {"x2", 2}, {"x3", 3}},
                          {{"v1", {"x1", "x2"}}, {"v2", {"x3"}}})};
}

std::pair<Scenario, Scenario> merging_fixture() {
    // T = 2, n1 = 7 block voters vs n2 = 8; the block transform is
    // eps = (r - r^2) * 2 with r = 7/15, and n1 * eps must beat k*T = 2.
    constexpr int n1 = 7, n2 = 8;
    const Rational r(n1, n1 + n2);
    const Rational eps = (r - r * r) * 2;
    if (!(n1 * eps > 2))
        throw std::logic_error("merging fixture parameters fail the proof inequality");

    Scenario before;
    before.budget = 2;
    before.meta["budget"] = "2";
    before.projects = {Project{"x1", "", 1, {}}, Project{"x2", "", 1, {}}, Project{"y", "", 2, {}}};
    Scenario after;
    after.budget = 2;
    after.meta["budget"] = "2";
    after.projects = {Project{"x", "", 2, {}}, Project{"y", "", 2, {}}};
    for (int i = 0; i < n1; ++i) {
        Ballot b;
        b.voter_id = "block" + std::to_string(i + 1);
        b.approvals = {0, 1};
        b.mask = mask_bit(0) | mask_bit(1);
        before.ballots.push_back(b);
        Ballot merged;
        merged.voter_id = b.voter_id;
        merged.approvals = {0};
        merged.mask = mask_bit(0);
        after.ballots.push_back(std::move(merged));
    }
    for (int i = 0; i < n2; ++i) {
        Ballot b;
        b.voter_id = "solo" + std::to_string(i + 1);
        b.approvals = {2};
        b.mask = mask_bit(2);
        before.ballots.push_back(b);
        Ballot merged;
        merged.voter_id = b.voter_id;
        merged.approvals = {1};
        merged.mask = mask_bit(1);
        after.ballots.push_back(std::move(merged));
    }
    return {validate(before, ValidationPolicy::Strict), validate(after, ValidationPolicy::Strict)};
}

namespace {

AxiomVerdict fixture_verdict(const std::string& axiom, Aggregator agg, const Scenario& before,
                             const Scenario& after, const std::vector<std::string>& premise_ids,
                             const std::string& must_reenter_id) {
    constexpr std::uint32_t kFixtureAdditivity = 2;
    AxiomVerdict v;
    v.axiom = axiom + " [" + aggregator_name(agg) + "]";

    const SynergyModel mb = build_model(before, kFixtureAdditivity);
    const SolveReport rb = brute_force(mb, before, agg);
    for (const std::string& id : premise_ids) {
        const auto idx = before.index_of(id);
        if (!idx || !mask_contains(rb.bundle.mask, *idx)) {
            v.holds = true;  // fixture failed: the axiom's premise never fired
            v.universe = "fixture premise failed: " + id + " not in winner " +
                         subset_label(before, rb.bundle.mask);
            return v;
        }
    }

    const SynergyModel ma = build_model(after, kFixtureAdditivity);
    const SolveReport ra = brute_force(ma, after, agg);
    const auto reenter_idx = after.index_of(must_reenter_id);
    const bool still_in = reenter_idx && mask_contains(ra.bundle.mask, *reenter_idx);

    v.universe = "oracle winners: " + subset_label(before, rb.bundle.mask) + " -> " +
                 subset_label(after, ra.bundle.mask) + ", u_M k=2";
    if (still_in) {
        v.holds = true;  // axiom satisfied on this instance; violation not exhibited
    } else {
        v.witness = premise_ids.front() + " funded before, " + must_reenter_id +
                    " unfunded after: winner " + subset_label(before, rb.bundle.mask) + " -> " +
                    subset_label(after, ra.bundle.mask);
    }
    return v;
}

}  // namespace

std::vector<AxiomVerdict> run_counterexample_fixtures(std::span<const Aggregator> aggs) {
    std::vector<AxiomVerdict> verdicts;
    for (Aggregator agg : aggs) {
        verdicts.push_back(fixture_verdict("discount monotonicity", agg, discount_fixture_before(),
                                           discount_fixture_after(), {"x1"}, "x1"));
        const auto [limit_before, limit_after] = limit_fixture(agg);
        const std::string leaving = (agg == Aggregator::Sum) ? "x3" : "x1";
        verdicts.push_back(fixture_verdict("limit monotonicity", agg, limit_before, limit_after,
                                           {leaving}, leaving));
        if (agg == Aggregator::Sum) {
            const auto [merge_before, merge_after] = merging_fixture();
            verdicts.push_back(fixture_verdict("merging monotonicity", agg, merge_before,
                                               merge_after, {"x1", "x2"}, "x"));
        }
    }
    return verdicts;
}

}  // namespace pbsyn
