#include "pbsyn/synergy.hpp"

#include <algorithm>
#include <stdexcept>

namespace pbsyn {

struct SynergyModel::Memo {
    std::mutex mutex;
    std::unordered_map<ProjectMask, Rational> transforms;
    std::unordered_map<ProjectMask, Rational> utilities;
};

SynergyModel::SynergyModel() : memo_(std::make_unique<Memo>()) {}
SynergyModel::SynergyModel(SynergyModel&&) noexcept = default;
SynergyModel& SynergyModel::operator=(SynergyModel&&) noexcept = default;
SynergyModel::~SynergyModel() = default;

Rational appearance_rate(const Scenario& scenario, ProjectMask subset) {
    if ((subset & ~scenario.all_projects_mask()) != 0)
        throw std::out_of_range("subset references a project outside the scenario");
    if (subset == 0) return 1;
    std::int64_t count = 0;
    for (const Ballot& b : scenario.ballots)
        if (mask_subset_of(subset, b.mask)) ++count;
    return Rational(count, static_cast<std::int64_t>(scenario.ballots.size()));
}

SynergyModel SynergyModel::build(const Scenario& scenario, Additivity k) {
    if (k && *k < 1) throw std::invalid_argument("additivity bound must be >= 1");
    if (!k && scenario.projects.size() > kUnboundedEnumerationCap)
        throw std::invalid_argument(
            "unbounded additivity needs n <= " + std::to_string(kUnboundedEnumerationCap) +
            " (2^n transform table); pass a k bound instead");

    SynergyModel m;
    m.k_ = k;
    m.fingerprint_ = scenario_fingerprint(scenario);
    m.budget_ = scenario.budget;
    m.costs_.reserve(scenario.projects.size());
    for (const Project& p : scenario.projects) m.costs_.push_back(p.cost);
    m.ballot_masks_.reserve(scenario.ballots.size());
    for (const Ballot& b : scenario.ballots) m.ballot_masks_.push_back(b.mask);

    const auto v = static_cast<std::int64_t>(m.ballot_masks_.size());
    m.singleton_rates_.resize(m.costs_.size());
    for (std::uint32_t i = 0; i < m.costs_.size(); ++i) {
        std::int64_t count = 0;
        for (ProjectMask ballot : m.ballot_masks_)
            if (mask_contains(ballot, i)) ++count;
        m.singleton_rates_[i] = Rational(count, v);
    }

    // Eager pass: ballot-contained subsets up to min(k, cap); only these can
    // reach a voter's satisfaction, everything else resolves lazily.
    constexpr std::uint32_t kEagerSizeCap = 3;
    const std::uint32_t eager_hi = std::min<std::uint32_t>(k ? *k : kEagerSizeCap, kEagerSizeCap);
    if (eager_hi >= 2) {
        std::vector<ProjectMask> pending;
        std::unordered_map<ProjectMask, bool> seen;
        for (ProjectMask ballot : m.ballot_masks_) {
            for_each_subset_sized(ballot, 2, eager_hi, [&](ProjectMask sub) {
                if (!seen.emplace(sub, true).second) return;
                pending.push_back(sub);
            });
        }
        std::sort(pending.begin(), pending.end(), [](ProjectMask a, ProjectMask b) {
            const auto sa = mask_size(a), sb = mask_size(b);
            return sa != sb ? sa < sb : a < b;
        });
        for (ProjectMask sub : pending)
            if (m.transform(sub) < 0) m.negative_transforms_.push_back(sub);
    }
    // With k <= the eager cap the negative list is complete, which justifies
    // the instant zero for larger subsets that contain no negative.
    m.fast_zero_ready_ = k && *k <= kEagerSizeCap;
    return m;
}

std::int64_t SynergyModel::subset_cost(ProjectMask subset) const {
    std::int64_t total = 0;
    for_each_member(subset, [&](std::uint32_t i) { total += costs_.at(i); });
    return total;
}

Rational SynergyModel::rate(ProjectMask subset) const {
    if (subset == 0) return 1;
    std::int64_t count = 0;
    for (ProjectMask ballot : ballot_masks_)
        if (mask_subset_of(subset, ballot)) ++count;
    return Rational(count, static_cast<std::int64_t>(ballot_masks_.size()));
}

Rational SynergyModel::raw_term(ProjectMask subset) const {
    Rational expected = 1;
    for_each_member(subset, [&](std::uint32_t i) { expected *= singleton_rates_[i]; });
    return (rate(subset) - expected) * subset_cost(subset);
}

bool SynergyModel::is_ballot_contained(ProjectMask subset) const {
    for (ProjectMask ballot : ballot_masks_)
        if (mask_subset_of(subset, ballot)) return true;
    return false;
}

bool SynergyModel::repairs_possible_within(ProjectMask container) const {
    if (!k_) return false;  // no size bound, nothing above it
    if (*k_ == 1) return false;
    if (!fast_zero_ready_ || !is_ballot_contained(container)) return true;
    for (ProjectMask neg : negative_transforms_)
        if (mask_subset_of(neg, container)) return true;
    return false;
}

Rational SynergyModel::transform(ProjectMask subset) const {
    const std::uint32_t size = mask_size(subset);
    if (size == 0) return 0;
    if (!has_overrides_) {
        if (size == 1) return costs_[mask_members(subset)[0]];
        if (k_ && size > *k_ && !repairs_possible_within(subset)) return 0;
    }
    {
        std::lock_guard<std::mutex> lock(memo_->mutex);
        const auto it = memo_->transforms.find(subset);
        if (it != memo_->transforms.end()) return it->second;
    }
    if (size == 1) return costs_[mask_members(subset)[0]];
    Rational value = transform_uncached(subset);
    std::lock_guard<std::mutex> lock(memo_->mutex);
    // first store wins; racing computations produce the same value
    return memo_->transforms.emplace(subset, std::move(value)).first->second;
}

Rational SynergyModel::transform_uncached(ProjectMask subset) const {
    const std::uint32_t size = mask_size(subset);
    const auto members = mask_members(subset);
    const bool above_bound = k_ && size > *k_;

    // Super-set-monotonicity floor: for each member a, minus the sum of
    // transforms of proper subsets containing a. Within the bound only
    // subsets of size <= k contribute unless repairs can occur inside.
    std::vector<Rational> member_sums(members.size(), Rational(0));
    std::uint32_t hi = size - 1;
    if (k_ && !repairs_possible_within(subset)) hi = std::min(*k_, size - 1);
    for_each_subset_sized(subset, 1, hi, [&](ProjectMask sub) {
        if (sub == subset) return;
        const Rational mc = transform(sub);
        if (mc == 0) return;
        for (std::size_t j = 0; j < members.size(); ++j)
            if (mask_contains(sub, members[j])) member_sums[j] += mc;
    });
    Rational floor = -member_sums[0];
    for (std::size_t j = 1; j < members.size(); ++j) {
        Rational candidate = -member_sums[j];
        if (candidate > floor) floor = std::move(candidate);
    }

    // Above the bound the raw synergy term is zeroed by hypothesis; the floor
    // still applies so u_M stays monotone.
    Rational raw = above_bound ? Rational(0) : raw_term(subset);
    return raw > floor ? raw : floor;
}

Rational SynergyModel::utility(ProjectMask subset) const {
    const std::uint32_t size = mask_size(subset);
    if (size == 0) return 0;
    if (size == 1) return transform(subset);
    {
        std::lock_guard<std::mutex> lock(memo_->mutex);
        const auto it = memo_->utilities.find(subset);
        if (it != memo_->utilities.end()) return it->second;
    }
    Rational value = utility_uncached(subset);
    std::lock_guard<std::mutex> lock(memo_->mutex);
    return memo_->utilities.emplace(subset, std::move(value)).first->second;
}

Rational SynergyModel::utility_uncached(ProjectMask subset) const {
    Rational total = 0;
    const std::uint32_t size = mask_size(subset);
    std::uint32_t hi = size;
    if (k_ && !has_overrides_ && !repairs_possible_within(subset)) hi = std::min(*k_, size);
    for_each_subset_sized(subset, 1, hi, [&](ProjectMask sub) { total += transform(sub); });
    return total;
}

bool SynergyModel::has_cached_transform(ProjectMask subset) const {
    std::lock_guard<std::mutex> lock(memo_->mutex);
    return memo_->transforms.count(subset) != 0;
}

std::size_t SynergyModel::cached_transform_count() const {
    std::lock_guard<std::mutex> lock(memo_->mutex);
    return memo_->transforms.size();
}

void SynergyModel::debug_override_transform(ProjectMask subset, Rational value) {
    std::lock_guard<std::mutex> lock(memo_->mutex);
    has_overrides_ = true;
    memo_->transforms[subset] = std::move(value);
    memo_->utilities.clear();
}

SynergyModel build_model(const Scenario& scenario, Additivity k) {
    return SynergyModel::build(scenario, k);
}

namespace {
void require_bound(const SynergyModel& model, const Scenario& scenario) {
    if (!model.bound_to(scenario))
        throw std::logic_error("synergy model is not bound to this scenario");
}
}  // namespace

Rational mobius_transform(const SynergyModel& model, const Scenario& scenario, ProjectMask subset) {
    require_bound(model, scenario);
    if ((subset & ~scenario.all_projects_mask()) != 0)
        throw std::out_of_range("subset references a project outside the scenario");
    return model.transform(subset);
}

Rational utility_um(const SynergyModel& model, const Scenario& scenario, ProjectMask subset) {
    require_bound(model, scenario);
    if ((subset & ~scenario.all_projects_mask()) != 0)
        throw std::out_of_range("subset references a project outside the scenario");
    return model.utility(subset);
}

std::vector<Rational> mobius_from_utility_table(std::span<const Rational> utilities) {
    const std::size_t size = utilities.size();
    if (size == 0 || (size & (size - 1)) != 0)
        throw std::invalid_argument("utility table must have 2^n entries");
    std::uint32_t n = 0;
    while ((std::size_t{1} << n) < size) ++n;
    if (n > kUnboundedEnumerationCap)
        throw std::invalid_argument("ground set larger than the enumeration cap");
    if (utilities[0] != 0) throw std::invalid_argument("u(empty) must be 0");

    std::vector<Rational> m(size);
    for (ProjectMask s = 0; s < size; ++s) {
        Rational acc = 0;
        for_each_submask(s, [&](ProjectMask c) {
            const std::uint32_t diff = mask_size(s) - mask_size(c);
            if (diff % 2 == 0)
                acc += utilities[c];
            else
                acc -= utilities[c];
        });
        // empty submask: sign (-1)^{|S|}, u(empty) = 0, contributes nothing
        m[s] = std::move(acc);
    }
    return m;
}

std::vector<InteractionRecord> interaction_report(const SynergyModel& model,
                                                  const Scenario& scenario,
                                                  std::uint32_t size_limit,
                                                  const Rational& threshold) {
    require_bound(model, scenario);
    std::vector<InteractionRecord> records;
    const std::uint32_t hi =
        model.additivity() ? std::min(size_limit, *model.additivity()) : size_limit;
    if (hi < 2) return records;

    for_each_subset_sized(scenario.all_projects_mask(), 2, hi, [&](ProjectMask sub) {
        const std::int64_t cost = model.subset_cost(sub);
        if (cost > scenario.budget) return;
        InteractionRecord rec;
        rec.subset = sub;
        rec.cost = cost;
        rec.rate = model.rate(sub);
        rec.expected_rate = 1;
        for_each_member(sub, [&](std::uint32_t i) { rec.expected_rate *= model.singleton_rate(i); });
        rec.raw_term = (rec.rate - rec.expected_rate) * cost;
        if (abs(rec.raw_term) < threshold) return;
        rec.transform = model.transform(sub);
        const int s = sign_of(rec.transform);
        rec.classification = s > 0   ? InteractionClass::Positive
                             : s < 0 ? InteractionClass::Negative
                                     : InteractionClass::Independent;
        records.push_back(std::move(rec));
    });

    std::sort(records.begin(), records.end(), [](const InteractionRecord& a, const InteractionRecord& b) {
        const Rational ma = abs(a.transform), mb = abs(b.transform);
        if (ma != mb) return ma > mb;
        return a.subset < b.subset;
    });
    return records;
}

}  // namespace pbsyn
