#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pbsyn/rational.hpp"
#include "pbsyn/scenario.hpp"
#include "pbsyn/subsets.hpp"

namespace pbsyn {

/// Additivity bound: transforms of subsets larger than k are zero.
/// nullopt means unbounded (full 2^n table reachable, n capped at 20).
using Additivity = std::optional<std::uint32_t>;

inline constexpr std::uint32_t kUnboundedEnumerationCap = 20;

/// Fraction of ballots containing all of S; r(empty) = 1 by convention.
Rational appearance_rate(const Scenario& scenario, ProjectMask subset);

enum class InteractionClass { Positive, Negative, Independent };

struct InteractionRecord {
    ProjectMask subset = 0;
    std::int64_t cost = 0;
    Rational rate;           // r(S)
    Rational expected_rate;  // product of member rates
    Rational raw_term;       // (r(S) - expected) * cost(S)
    Rational transform;      // m(S) after the monotonicity floor
    InteractionClass classification = InteractionClass::Independent;
};

/// Frozen table of Möbius transforms m(S,E) under a k-additivity bound.
///
///   m(empty) = 0,  m({a}) = cost(a),  and for 2 <= |S| <= k
///   m(S) = max( (r(S) - prod_a r({a})) * cost(S),
///               max_{a in S} ( -sum_{C subset S, a in C} m(C) ) ).
///
/// Above the bound the k-additivity hypothesis zeroes the raw synergy term
/// but the super-set-monotonicity floor stays in force:
///   m(S) = max(0, floor(S)) for |S| > k.
/// This is 0 whenever the floor is inactive (the common case) and is what
/// keeps u_M monotone at every k; dropping transforms above k outright would
/// let two floor-clipped pairs push u_M(S) below u_M(S \ {a}).
///
/// Transforms for ballot-contained subsets up to the eager size cap are
/// materialized at build time; anything else is computed on first lookup and
/// memoized under a lock, so a frozen model supports concurrent readers.
class SynergyModel {
public:
    static SynergyModel build(const Scenario& scenario, Additivity k);

    SynergyModel(SynergyModel&&) noexcept;
    SynergyModel& operator=(SynergyModel&&) noexcept;
    SynergyModel(const SynergyModel&) = delete;
    SynergyModel& operator=(const SynergyModel&) = delete;
    ~SynergyModel();

    Additivity additivity() const { return k_; }
    std::uint64_t fingerprint() const { return fingerprint_; }
    bool bound_to(const Scenario& scenario) const {
        return fingerprint_ == scenario_fingerprint(scenario);
    }

    std::size_t voter_count() const { return ballot_masks_.size(); }
    std::size_t project_count() const { return costs_.size(); }
    std::int64_t cost_of(std::uint32_t project) const { return costs_[project]; }
    std::int64_t subset_cost(ProjectMask subset) const;
    ProjectMask ballot_mask(std::size_t voter) const { return ballot_masks_[voter]; }
    std::span<const ProjectMask> ballot_masks() const { return ballot_masks_; }
    std::int64_t budget() const { return budget_; }

    Rational rate(ProjectMask subset) const;
    const Rational& singleton_rate(std::uint32_t project) const { return singleton_rates_[project]; }

    /// Raw synergy term (r(S) - prod member rates) * cost(S); no floor.
    Rational raw_term(ProjectMask subset) const;

    /// m(S,E), memoized, thread-safe.
    Rational transform(ProjectMask subset) const;

    /// u_M(S,E) = sum over C subset-of S of m(C,E), memoized, thread-safe.
    Rational utility(ProjectMask subset) const;

    /// True if the transform of this subset is already in the table (tests).
    bool has_cached_transform(ProjectMask subset) const;
    std::size_t cached_transform_count() const;

    /// Diagnostics hook: plants a transform value and clears derived caches.
    /// Used only by axiom negative controls and the CLI corruption flag.
    void debug_override_transform(ProjectMask subset, Rational value);

    bool is_ballot_contained(ProjectMask subset) const;

    /// True when a subset of `container` larger than k could carry a nonzero
    /// (monotonicity-repair) transform; false lets callers cap enumerations
    /// at size k.
    bool repairs_possible_within(ProjectMask container) const;

private:
    SynergyModel();

    Rational transform_uncached(ProjectMask subset) const;
    Rational utility_uncached(ProjectMask subset) const;

    Additivity k_;
    bool has_overrides_ = false;
    std::uint64_t fingerprint_ = 0;
    std::int64_t budget_ = 0;
    std::vector<std::int64_t> costs_;
    std::vector<ProjectMask> ballot_masks_;
    std::vector<Rational> singleton_rates_;

    // ballot-contained subsets of size 2..k with a negative transform; only
    // sets containing one of these can need a repair above the bound
    bool fast_zero_ready_ = false;
    std::vector<ProjectMask> negative_transforms_;

    struct Memo;
    std::unique_ptr<Memo> memo_;  // synchronized lazy caches; keeps the model movable
};

/// Free-function façade; each call checks the model/scenario binding.
SynergyModel build_model(const Scenario& scenario, Additivity k);
Rational mobius_transform(const SynergyModel& model, const Scenario& scenario, ProjectMask subset);
Rational utility_um(const SynergyModel& model, const Scenario& scenario, ProjectMask subset);

/// Classical Möbius inversion of a complete utility table over a ground set of
/// n <= 20 items: m(S) = sum_{C subset S} (-1)^{|S \ C|} u(C). The input is
/// indexed by subset mask and must have exactly 2^n entries with u(0) = 0.
std::vector<Rational> mobius_from_utility_table(std::span<const Rational> utilities);

/// Interaction records for subsets of size 2..min(limit, k) with cost <= budget
/// and |raw term| >= threshold, sorted by |transform| descending (mask order on
/// ties).
std::vector<InteractionRecord> interaction_report(const SynergyModel& model,
                                                  const Scenario& scenario,
                                                  std::uint32_t size_limit,
                                                  const Rational& threshold);

}  // namespace pbsyn
