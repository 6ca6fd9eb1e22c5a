#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace pbsyn {

/// Subsets of projects are bitmasks over project indices (index limit 64).
using ProjectMask = std::uint64_t;

inline constexpr ProjectMask mask_bit(std::uint32_t index) { return ProjectMask{1} << index; }
inline constexpr bool mask_contains(ProjectMask set, std::uint32_t index) {
    return (set & mask_bit(index)) != 0;
}
inline constexpr std::uint32_t mask_size(ProjectMask set) {
    return static_cast<std::uint32_t>(std::popcount(set));
}
inline constexpr bool mask_subset_of(ProjectMask sub, ProjectMask super) {
    return (sub & ~super) == 0;
}

inline std::vector<std::uint32_t> mask_members(ProjectMask set) {
    std::vector<std::uint32_t> members;
    members.reserve(mask_size(set));
    while (set) {
        members.push_back(static_cast<std::uint32_t>(std::countr_zero(set)));
        set &= set - 1;
    }
    return members;
}

template <typename Fn>
void for_each_member(ProjectMask set, Fn&& fn) {
    while (set) {
        fn(static_cast<std::uint32_t>(std::countr_zero(set)));
        set &= set - 1;
    }
}

/// All non-empty proper or improper submasks of `set`, smallest-last order of
/// the classic (sub - 1) & set walk. Includes `set` itself, excludes 0.
template <typename Fn>
void for_each_submask(ProjectMask set, Fn&& fn) {
    ProjectMask sub = set;
    while (sub) {
        fn(sub);
        sub = (sub - 1) & set;
    }
}

namespace detail {
template <typename Fn>
void combos(const std::vector<std::uint32_t>& members, std::uint32_t want, std::size_t from,
            ProjectMask acc, Fn&& fn) {
    if (want == 0) {
        fn(acc);
        return;
    }
    for (std::size_t i = from; i + want <= members.size() + 0u && i < members.size(); ++i) {
        if (members.size() - i < want) break;
        combos(members, want - 1, i + 1, acc | mask_bit(members[i]), fn);
    }
}
}  // namespace detail

/// Subsets of `set` whose size lies in [lo, hi]. Falls back to a plain submask
/// walk when the range covers everything (cheaper than building combinations).
template <typename Fn>
void for_each_subset_sized(ProjectMask set, std::uint32_t lo, std::uint32_t hi, Fn&& fn) {
    const std::uint32_t n = mask_size(set);
    if (hi > n) hi = n;
    if (lo > hi) return;
    if (lo <= 1 && hi == n) {
        for_each_submask(set, [&](ProjectMask sub) {
            if (mask_size(sub) >= lo) fn(sub);
        });
        return;
    }
    const auto members = mask_members(set);
    for (std::uint32_t size = lo; size <= hi; ++size) {
        detail::combos(members, size, 0, 0, fn);
    }
}

}  // namespace pbsyn
