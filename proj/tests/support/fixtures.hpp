#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "pbsyn/scenario.hpp"

namespace pbsyn::testing {

inline Scenario build_scenario(
    std::int64_t budget, std::initializer_list<std::pair<const char*, std::int64_t>> projects,
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

/// Budget 9, projects A..E of costs (2,3,3,1,1), ballots
/// {A,B,D,E}, {A,B,C}, {C,E}, {A,B,D}.
inline Scenario example1() {
    return build_scenario(9, {{"A", 2}, {"B", 3}, {"C", 3}, {"D", 1}, {"E", 1}},
                          {{"v1", {"A", "B", "D", "E"}},
                           {"v2", {"A", "B", "C"}},
                           {"v3", {"C", "E"}},
                           {"v4", {"A", "B", "D"}}});
}

inline ProjectMask ids(const Scenario& s, std::initializer_list<const char*> list) {
    ProjectMask m = 0;
    for (const char* id : list) m |= mask_bit(*s.index_of(id));
    return m;
}

}  // namespace pbsyn::testing
