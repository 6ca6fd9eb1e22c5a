#include "pbsyn/solver.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <unordered_set>

namespace pbsyn {

namespace {

void require_bound(const SynergyModel& model, const Scenario& scenario) {
    if (!model.bound_to(scenario))
        throw std::logic_error("synergy model is not bound to this scenario");
}

using Clock = std::chrono::steady_clock;

}  // namespace

std::string aggregator_name(Aggregator agg) {
    switch (agg) {
        case Aggregator::Sum: return "sum";
        case Aggregator::Min: return "min";
        case Aggregator::Product: return "prod";
    }
    return "?";
}

std::optional<Aggregator> aggregator_from_name(const std::string& name) {
    if (name == "sum") return Aggregator::Sum;
    if (name == "min") return Aggregator::Min;
    if (name == "prod" || name == "product") return Aggregator::Product;
    return std::nullopt;
}

int compare_scores(Aggregator agg, const Score& a, const Score& b) {
    if (agg == Aggregator::Product && a.zeros != b.zeros)
        return a.zeros < b.zeros ? 1 : -1;
    if (a.value == b.value) return 0;
    return a.value > b.value ? 1 : -1;
}

Bundle make_bundle(const Scenario& scenario, ProjectMask mask) {
    return Bundle{mask, subset_cost(scenario, mask)};
}

bool bundle_lex_less(const Scenario& scenario, ProjectMask a, ProjectMask b) {
    const auto ids_a = subset_ids(scenario, a);
    const auto ids_b = subset_ids(scenario, b);
    return std::lexicographical_compare(ids_a.begin(), ids_a.end(), ids_b.begin(), ids_b.end());
}

Rational satisfaction(const SynergyModel& model, const Scenario& scenario, std::size_t voter,
                      ProjectMask bundle) {
    require_bound(model, scenario);
    if (voter >= scenario.ballots.size()) throw std::out_of_range("unknown voter index");
    return model.utility(scenario.ballots[voter].mask & bundle);
}

Score aggregate(const SynergyModel& model, const Scenario& scenario, ProjectMask bundle,
                Aggregator agg) {
    require_bound(model, scenario);
    Score score;
    switch (agg) {
        case Aggregator::Sum: {
            for (const Ballot& b : scenario.ballots) score.value += model.utility(b.mask & bundle);
            break;
        }
        case Aggregator::Min: {
            bool first = true;
            for (const Ballot& b : scenario.ballots) {
                Rational u = model.utility(b.mask & bundle);
                if (first || u < score.value) score.value = std::move(u);
                first = false;
            }
            break;
        }
        case Aggregator::Product: {
            score.value = 1;
            for (const Ballot& b : scenario.ballots) {
                const Rational u = model.utility(b.mask & bundle);
                if (u == 0)
                    ++score.zeros;
                else
                    score.value *= u;
            }
            break;
        }
    }
    return score;
}

std::vector<std::uint32_t> approval_counts(const Scenario& scenario) {
    std::vector<std::uint32_t> counts(scenario.projects.size(), 0);
    for (const Ballot& b : scenario.ballots)
        for_each_member(b.mask, [&](std::uint32_t i) { ++counts[i]; });
    return counts;
}

std::vector<std::uint32_t> approval_order(const Scenario& scenario) {
    const auto counts = approval_counts(scenario);
    std::vector<std::uint32_t> order(scenario.projects.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (counts[a] != counts[b]) return counts[a] > counts[b];
        return scenario.projects[a].id < scenario.projects[b].id;
    });
    return order;
}

namespace {

/// Approval-order scan over `candidates`, funding what fits.
ProjectMask greedy_scan(const Scenario& scenario, std::span<const std::uint32_t> order,
                        ProjectMask start, ProjectMask candidates, std::int64_t remaining) {
    ProjectMask bundle = start;
    for (std::uint32_t p : order) {
        if (!mask_contains(candidates, p) || mask_contains(bundle, p)) continue;
        const std::int64_t c = scenario.projects[p].cost;
        if (c <= remaining) {
            bundle |= mask_bit(p);
            remaining -= c;
        }
    }
    return bundle;
}

/// u_M(inter + a) - u_M(inter) for a not in inter: the transforms of the newly
/// completed subsets, all of which contain a.
Rational include_delta(const SynergyModel& model, ProjectMask inter, std::uint32_t a) {
    Rational delta = model.cost_of(a);
    const std::uint32_t inter_size = mask_size(inter);
    const Additivity k = model.additivity();
    const ProjectMask abit = mask_bit(a);
    std::uint32_t hi = inter_size;
    if (k && !model.repairs_possible_within(inter | abit)) hi = std::min(*k - 1, inter_size);
    if (hi >= 1) {
        for_each_subset_sized(inter, 1, hi,
                              [&](ProjectMask sub) { delta += model.transform(sub | abit); });
    }
    return delta;
}

/// Min/Product heuristic: grow `bundle` from the given satisfaction state,
/// choosing among `candidates` only.
ProjectMask greedy_min_prod_from(const SynergyModel& model, const Scenario& scenario,
                                 std::span<const std::uint32_t> order, ProjectMask bundle,
                                 ProjectMask candidates, std::int64_t remaining,
                                 std::vector<ProjectMask> inters, std::vector<Rational> sats) {
    const std::size_t v = scenario.ballots.size();
    for (;;) {
        Rational min_sat = sats[0];
        for (std::size_t i = 1; i < v; ++i)
            if (sats[i] < min_sat) min_sat = sats[i];

        std::optional<std::uint32_t> best;
        std::uint32_t best_least = 0;
        for (std::uint32_t p : order) {
            if (!mask_contains(candidates, p) || mask_contains(bundle, p)) continue;
            if (scenario.projects[p].cost > remaining) continue;
            std::uint32_t least = 0;
            for (std::size_t i = 0; i < v; ++i)
                if (sats[i] == min_sat && mask_contains(scenario.ballots[i].mask, p)) ++least;
            if (least == 0) continue;
            // order already breaks the (overall approvals, id) ties
            if (!best || least > best_least) {
                best = p;
                best_least = least;
            }
        }
        if (!best) break;

        const std::uint32_t p = *best;
        bundle |= mask_bit(p);
        remaining -= scenario.projects[p].cost;
        for (std::size_t i = 0; i < v; ++i) {
            if (!mask_contains(scenario.ballots[i].mask, p)) continue;
            sats[i] += include_delta(model, inters[i], p);
            inters[i] |= mask_bit(p);
        }
    }
    return greedy_scan(scenario, order, bundle, candidates, remaining);
}

}  // namespace

Bundle greedy_by_approvals(const Scenario& scenario) {
    const auto order = approval_order(scenario);
    const ProjectMask all = scenario.all_projects_mask();
    return make_bundle(scenario, greedy_scan(scenario, order, 0, all, scenario.budget));
}

Bundle greedy_min_prod(const SynergyModel& model, const Scenario& scenario, Aggregator agg) {
    require_bound(model, scenario);
    if (agg == Aggregator::Sum) throw std::invalid_argument("greedy_min_prod expects min or prod");
    const auto order = approval_order(scenario);
    std::vector<ProjectMask> inters(scenario.ballots.size(), 0);
    std::vector<Rational> sats(scenario.ballots.size(), Rational(0));
    const ProjectMask result =
        greedy_min_prod_from(model, scenario, order, 0, scenario.all_projects_mask(),
                             scenario.budget, std::move(inters), std::move(sats));
    return make_bundle(scenario, result);
}

namespace {

/// Ballot-contained subsets containing `a`, sizes 2..k, cost <= budget, with a
/// positive transform. `divide` selects m(C)/|C| (apportioned cap) vs m(C)
/// (marginal cap used by the Sum relaxation).
Rational positive_transform_sum(const SynergyModel& model, std::uint32_t a, bool divide) {
    const Additivity k = model.additivity();
    std::unordered_set<ProjectMask> seen;
    Rational total = 0;
    const ProjectMask abit = mask_bit(a);
    for (ProjectMask ballot : model.ballot_masks()) {
        if (!mask_contains(ballot, a)) continue;
        const ProjectMask rest = ballot & ~abit;
        std::uint32_t hi = mask_size(rest);
        if (k && !model.repairs_possible_within(ballot)) hi = std::min(*k - 1, hi);
        if (hi < 1) continue;
        for_each_subset_sized(rest, 1, hi, [&](ProjectMask sub) {
            const ProjectMask c = sub | abit;
            if (!seen.insert(c).second) return;
            if (model.subset_cost(c) > model.budget()) return;
            const Rational m = model.transform(c);
            if (m > 0) total += divide ? m / mask_size(c) : m;
        });
    }
    return total;
}

}  // namespace

Rational per_project_utility_cap(const SynergyModel& model, const Scenario& scenario,
                                 std::uint32_t project) {
    require_bound(model, scenario);
    if (project >= scenario.projects.size()) throw std::out_of_range("unknown project index");
    return Rational(model.cost_of(project)) + positive_transform_sum(model, project, true);
}

namespace {

struct SumRelax {
    std::vector<Rational> values;          // approvers(a) * margin cap(a)
    std::vector<std::uint32_t> sequence;   // relaxation order
};

SumRelax make_sum_relax(const SynergyModel& model, const Scenario& scenario,
                        RelaxationOrder order_kind) {
    SumRelax relax;
    const auto counts = approval_counts(scenario);
    const std::size_t n = scenario.projects.size();
    relax.values.resize(n);
    for (std::uint32_t a = 0; a < n; ++a) {
        const Rational margin =
            Rational(model.cost_of(a)) + positive_transform_sum(model, a, false);
        relax.values[a] = margin * counts[a];
    }
    relax.sequence.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) relax.sequence[i] = i;
    std::sort(relax.sequence.begin(), relax.sequence.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (order_kind == RelaxationOrder::Density) {
            const Rational da = relax.values[a] / model.cost_of(a);
            const Rational db = relax.values[b] / model.cost_of(b);
            if (da != db) return da > db;
        } else {
            if (relax.values[a] != relax.values[b]) return relax.values[a] > relax.values[b];
        }
        return scenario.projects[a].id < scenario.projects[b].id;
    });
    return relax;
}

Score sum_bound_core(const Scenario& scenario, const SearchNode& node,
                     const SumRelax& relax, const Rational& included_score) {
    Score bound;
    bound.value = included_score;
    const ProjectMask decided = node.included | node.banned;
    std::int64_t rem = node.remaining;
    for (std::uint32_t a : relax.sequence) {
        if (rem <= 0) break;
        if (mask_contains(decided, a)) continue;
        if (relax.values[a] == 0) continue;
        const std::int64_t c = scenario.projects[a].cost;
        if (c <= rem) {
            bound.value += relax.values[a];
            rem -= c;
        } else {
            bound.value += relax.values[a] * Rational(rem, c);
            break;
        }
    }
    return bound;
}

Score min_prod_bound_core(const SynergyModel& model, const Scenario& scenario,
                          const SearchNode& node, Aggregator agg, ProjectMask affordable) {
    const ProjectMask undecided =
        scenario.all_projects_mask() & ~(node.included | node.banned);
    Score bound;
    if (agg == Aggregator::Product) bound.value = 1;
    bool first = true;
    for (const Ballot& b : scenario.ballots) {
        const ProjectMask optimistic =
            (b.mask & node.included) | (b.mask & undecided & affordable);
        const Rational u = model.utility(optimistic);
        if (agg == Aggregator::Min) {
            if (first || u < bound.value) bound.value = u;
            first = false;
        } else {
            if (u == 0)
                ++bound.zeros;
            else
                bound.value *= u;
        }
    }
    return bound;
}

ProjectMask affordable_mask(const Scenario& scenario, std::int64_t remaining) {
    ProjectMask mask = 0;
    for (std::uint32_t a = 0; a < scenario.projects.size(); ++a)
        if (scenario.projects[a].cost <= remaining) mask |= mask_bit(a);
    return mask;
}

}  // namespace

Score upper_bound_sum(const SynergyModel& model, const Scenario& scenario, const SearchNode& node,
                      RelaxationOrder order) {
    require_bound(model, scenario);
    Rational included_score = 0;
    for (const Ballot& b : scenario.ballots) included_score += model.utility(b.mask & node.included);
    const SumRelax relax = make_sum_relax(model, scenario, order);
    return sum_bound_core(scenario, node, relax, included_score);
}

Score upper_bound_min_prod(const SynergyModel& model, const Scenario& scenario,
                           const SearchNode& node, Aggregator agg) {
    require_bound(model, scenario);
    if (agg == Aggregator::Sum) throw std::invalid_argument("expects min or prod");
    return min_prod_bound_core(model, scenario, node, agg,
                               affordable_mask(scenario, node.remaining));
}

Bundle exhaustive_fill(const Scenario& scenario, const Bundle& bundle) {
    const auto order = approval_order(scenario);
    const ProjectMask filled = greedy_scan(scenario, order, bundle.mask,
                                           scenario.all_projects_mask(),
                                           scenario.budget - bundle.cost);
    return make_bundle(scenario, filled);
}

namespace {

struct Incumbent {
    Score score;
    ProjectMask mask = 0;
};

struct Search {
    const SynergyModel& model;
    const Scenario& scenario;
    Aggregator agg;
    const SolveOptions& options;

    std::vector<std::uint32_t> order;
    std::vector<ProjectMask> prefix;  // prefix[d] = projects decided before depth d
    SumRelax relax;                   // Sum only

    std::vector<ProjectMask> inters;
    std::vector<Rational> sats;
    Rational sum_sats = 0;
    ProjectMask included = 0;
    std::int64_t remaining = 0;

    std::optional<Incumbent> incumbent;
    SolveReport report;
    bool stopped = false;
    Clock::time_point deadline;
    bool has_deadline = false;

    explicit Search(const SynergyModel& m, const Scenario& s, Aggregator a, const SolveOptions& o)
        : model(m), scenario(s), agg(a), options(o) {}

    void consider(ProjectMask candidate) {
        ProjectMask mask = candidate;
        if (options.apply_exhaustive_fill)
            mask = exhaustive_fill(scenario, make_bundle(scenario, candidate)).mask;
        Score s = aggregate(model, scenario, mask, agg);
        if (!incumbent) {
            incumbent = Incumbent{std::move(s), mask};
            return;
        }
        const int cmp = compare_scores(agg, s, incumbent->score);
        if (cmp > 0 || (cmp == 0 && bundle_lex_less(scenario, mask, incumbent->mask)))
            incumbent = Incumbent{std::move(s), mask};
    }

    ProjectMask completion(std::size_t depth) {
        ProjectMask candidates = 0;
        for (std::size_t p = depth; p < order.size(); ++p) candidates |= mask_bit(order[p]);
        if (agg == Aggregator::Sum)
            return greedy_scan(scenario, order, included, candidates, remaining);
        return greedy_min_prod_from(model, scenario, order, included, candidates, remaining,
                                    inters, sats);
    }

    Score bound(std::size_t depth, SearchNode& node) {
        node.included = included;
        node.banned = prefix[depth] & ~included;
        node.remaining = remaining;
        ++report.bound_evals;
        if (agg == Aggregator::Sum) return sum_bound_core(scenario, node, relax, sum_sats);
        return min_prod_bound_core(model, scenario, node, agg,
                                   affordable_mask(scenario, remaining));
    }

    bool limits_hit() {
        if (options.max_nodes && report.nodes_explored >= *options.max_nodes) return true;
        if (has_deadline && (report.nodes_explored & 63) == 0 && Clock::now() >= deadline)
            return true;
        return false;
    }

    void dfs(std::size_t depth) {
        if (stopped) return;
        ++report.nodes_explored;
        if (limits_hit()) {
            stopped = true;
            return;
        }

        consider(completion(depth));
        if (depth == order.size()) return;

        SearchNode node;
        const Score b = bound(depth, node);
        if (options.bound_audit) options.bound_audit(NodeAudit{node, b});
        if (incumbent && compare_scores(agg, b, incumbent->score) < 0) {
            ++report.nodes_pruned_bound;
            return;
        }

        const std::uint32_t a = order[depth];
        const std::int64_t cost = scenario.projects[a].cost;
        if (cost <= remaining) {
            // include branch
            std::vector<std::pair<std::size_t, Rational>> undo;
            for (std::size_t i = 0; i < scenario.ballots.size(); ++i) {
                if (!mask_contains(scenario.ballots[i].mask, a)) continue;
                undo.emplace_back(i, sats[i]);
                const Rational delta = include_delta(model, inters[i], a);
                sats[i] += delta;
                sum_sats += delta;
                inters[i] |= mask_bit(a);
            }
            included |= mask_bit(a);
            remaining -= cost;

            dfs(depth + 1);

            remaining += cost;
            included &= ~mask_bit(a);
            for (auto it = undo.rbegin(); it != undo.rend(); ++it) {
                sum_sats -= sats[it->first] - it->second;
                sats[it->first] = it->second;
                inters[it->first] &= ~mask_bit(a);
            }
        } else {
            ++report.nodes_pruned_budget;
        }
        dfs(depth + 1);  // ban branch
    }
};

}  // namespace

SolveReport branch_and_bound(const SynergyModel& model, const Scenario& scenario, Aggregator agg,
                             const SolveOptions& options) {
    require_bound(model, scenario);
    const auto start = Clock::now();

    Search search(model, scenario, agg, options);
    search.order = approval_order(scenario);
    search.prefix.resize(search.order.size() + 1, 0);
    for (std::size_t d = 0; d < search.order.size(); ++d)
        search.prefix[d + 1] = search.prefix[d] | mask_bit(search.order[d]);
    if (agg == Aggregator::Sum)
        search.relax = make_sum_relax(model, scenario, options.relaxation_order);
    search.inters.assign(scenario.ballots.size(), 0);
    search.sats.assign(scenario.ballots.size(), Rational(0));
    search.remaining = scenario.budget;
    if (options.max_millis) {
        search.deadline = start + std::chrono::milliseconds(*options.max_millis);
        search.has_deadline = true;
    }

    search.dfs(0);

    if (!search.incumbent) search.consider(0);  // limits hit before the root completion

    SolveReport report = std::move(search.report);
    report.aggregator = agg;
    report.k = model.additivity();
    report.bundle = make_bundle(scenario, search.incumbent->mask);
    report.score = search.incumbent->score;
    report.optimal = !search.stopped;
    report.wall_micros =
        std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start).count();
    report.wall_ms = report.wall_micros / 1000;
    return report;
}

SolveReport brute_force(const SynergyModel& model, const Scenario& scenario, Aggregator agg) {
    require_bound(model, scenario);
    const std::size_t n = scenario.projects.size();
    if (n > kUnboundedEnumerationCap)
        throw std::invalid_argument("brute force supports at most " +
                                    std::to_string(kUnboundedEnumerationCap) + " projects");
    const auto start = Clock::now();

    std::optional<Incumbent> best;
    const ProjectMask limit = ProjectMask{1} << n;
    SolveReport report;
    for (ProjectMask mask = 0; mask < limit; ++mask) {
        if (subset_cost(scenario, mask) > scenario.budget) continue;
        ++report.nodes_explored;
        Score s = aggregate(model, scenario, mask, agg);
        if (best && compare_scores(agg, s, best->score) < 0) continue;
        const ProjectMask filled = exhaustive_fill(scenario, make_bundle(scenario, mask)).mask;
        Score fs = (filled == mask) ? std::move(s) : aggregate(model, scenario, filled, agg);
        if (!best) {
            best = Incumbent{std::move(fs), filled};
            continue;
        }
        const int cmp = compare_scores(agg, fs, best->score);
        if (cmp > 0 || (cmp == 0 && bundle_lex_less(scenario, filled, best->mask)))
            best = Incumbent{std::move(fs), filled};
    }

    report.aggregator = agg;
    report.k = model.additivity();
    report.bundle = make_bundle(scenario, best->mask);
    report.score = best->score;
    report.optimal = true;
    report.wall_micros =
        std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start).count();
    report.wall_ms = report.wall_micros / 1000;
    return report;
}

ComparisonRecord compare_with_linear(const Scenario& scenario, Aggregator agg, Additivity k,
                                     const SolveOptions& options) {
    ComparisonRecord rec;
    const SynergyModel linear = build_model(scenario, 1);
    rec.winner_linear = branch_and_bound(linear, scenario, agg, options).bundle;
    const SynergyModel synergy = build_model(scenario, k);
    rec.winner_synergy = branch_and_bound(synergy, scenario, agg, options).bundle;
    rec.differs = rec.winner_linear.mask != rec.winner_synergy.mask;
    const ProjectMask symdiff = rec.winner_linear.mask ^ rec.winner_synergy.mask;
    rec.reallocation = Rational(subset_cost(scenario, symdiff), 2 * scenario.budget);
    return rec;
}

}  // namespace pbsyn
