#include <doctest.h>

#include <random>
#include <thread>

#include "pbsyn/solver.hpp"
#include "pbsyn/synergy.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/naive_um.hpp"

using namespace pbsyn;
using namespace pbsyn::testing;

TEST_CASE("appearance_rate on the worked example") {
    const Scenario s = example1();
    CHECK(appearance_rate(s, ids(s, {"A", "B"})) == Rational(3, 4));
    CHECK(appearance_rate(s, ids(s, {"C", "D"})) == 0);
    CHECK(appearance_rate(s, 0) == 1);
    CHECK_THROWS_AS(appearance_rate(s, mask_bit(60)), std::out_of_range);
}

TEST_CASE("mobius_transform on the worked example, pairs") {
    const Scenario s = example1();
    const SynergyModel model = build_model(s, 2);

    const Rational m_ab = mobius_transform(model, s, ids(s, {"A", "B"}));
    CHECK(m_ab == Rational(15, 16));
    CHECK(m_ab == naive_mobius(s, 2, ids(s, {"A", "B"})));

    // floor binding: raw (0 - 1/4)*4 = -1 equals max(-3, -1)
    const Rational m_cd = mobius_transform(model, s, ids(s, {"C", "D"}));
    CHECK(m_cd == Rational(-1));
    CHECK(m_cd == naive_mobius(s, 2, ids(s, {"C", "D"})));

    CHECK(mobius_transform(model, s, ids(s, {"A", "D"})) == Rational(3, 8));
    CHECK(mobius_transform(model, s, ids(s, {"B", "D"})) == Rational(1, 2));

    // k-additivity zeroing
    CHECK(mobius_transform(model, s, ids(s, {"A", "B", "D"})) == 0);
}

TEST_CASE("utility_um on the worked example") {
    const Scenario s = example1();
    const SynergyModel model = build_model(s, 2);

    CHECK(utility_um(model, s, ids(s, {"A", "B"})) == Rational(95, 16));
    CHECK(utility_um(model, s, ids(s, {"A", "B"})) == naive_um(s, 2, ids(s, {"A", "B"})));

    // monotonicity floor active: u({C,D}) == u({C})
    CHECK(utility_um(model, s, ids(s, {"C", "D"})) == 3);
    CHECK(utility_um(model, s, ids(s, {"C"})) == 3);

    CHECK(utility_um(model, s, ids(s, {"A", "B", "D"})) == Rational(125, 16));
}

TEST_CASE("k=1 collapses u_M to the subset cost") {
    std::mt19937_64 rng(31337);
    for (int i = 0; i < 10; ++i) {
        const Scenario s = random_scenario(rng, {.max_n = 8, .max_v = 10});
        const SynergyModel model = build_model(s, 1);
        for_each_subset_sized(s.all_projects_mask(), 1, 4, [&](ProjectMask sub) {
            CHECK(model.utility(sub) == subset_cost(s, sub));
        });
    }
}

TEST_CASE("build_model eagerly materializes ballot-contained pairs") {
    const Scenario s = example1();
    const SynergyModel model = build_model(s, 2);
    for (auto pair : {std::pair{"A", "B"}, {"A", "D"}, {"B", "D"}, {"A", "E"}, {"B", "E"},
                      {"D", "E"}, {"A", "C"}, {"B", "C"}, {"C", "E"}}) {
        CHECK(model.has_cached_transform(ids(s, {pair.first, pair.second})));
    }
    CHECK(model.cached_transform_count() == 9);
    CHECK_FALSE(model.has_cached_transform(ids(s, {"C", "D"})));
    CHECK(model.transform(ids(s, {"C", "D"})) == -1);  // lazy
    CHECK(model.has_cached_transform(ids(s, {"C", "D"})));
}

TEST_CASE("build_model degenerate bounds") {
    const SynergyModel k1 = build_model(example1(), 1);
    CHECK(k1.cached_transform_count() == 0);  // singleton costs only

    const Scenario single = build_scenario(5, {{"a", 3}}, {{"v1", {"a"}}});
    const SynergyModel m = build_model(single, std::nullopt);
    CHECK(m.utility(0) == 0);
    CHECK(m.utility(mask_bit(0)) == 3);
}

TEST_CASE("unbounded additivity refuses oversized scenarios") {
    Scenario s;
    s.budget = 100;
    s.meta["budget"] = "100";
    for (int i = 0; i < 21; ++i)
        s.projects.push_back(Project{padded("p", i + 1), "", 1, {}});
    Ballot b;
    b.voter_id = "v1";
    b.approvals = {0};
    b.mask = 1;
    s.ballots = {b};
    s = validate(s, ValidationPolicy::Strict);
    CHECK_THROWS_AS(build_model(s, std::nullopt), std::invalid_argument);
    CHECK_NOTHROW(build_model(s, 2));
}

TEST_CASE("model matches the direct-definition evaluator on random scenarios") {
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 8; ++i) {
        const Scenario s = random_scenario(rng, {.max_n = 7, .max_v = 10});
        for (Additivity k : {Additivity{1}, Additivity{2}, Additivity{3}, Additivity{}}) {
            const SynergyModel model = build_model(s, k);
            for (int draw = 0; draw < 12; ++draw) {
                ProjectMask sub = 0;
                const auto size = 1 + rng() % 4;
                while (mask_size(sub) < size)
                    sub |= mask_bit(static_cast<std::uint32_t>(rng() % s.projects.size()));
                CHECK(model.transform(sub) == naive_mobius(s, k, sub));
                CHECK(model.utility(sub) == naive_um(s, k, sub));
            }
        }
    }
}

TEST_CASE("mobius_from_utility_table reproduces the worked 3-item table") {
    // u: {} 0, {1} 0.2, {2} 0.4, {3} 0.5, {1,2} 0.5, {1,3} 0.7, {2,3} 0.8, {1,2,3} 1
    std::vector<Rational> u(8);
    u[0b000] = 0;
    u[0b001] = Rational(1, 5);
    u[0b010] = Rational(2, 5);
    u[0b100] = Rational(1, 2);
    u[0b011] = Rational(1, 2);
    u[0b101] = Rational(7, 10);
    u[0b110] = Rational(4, 5);
    u[0b111] = 1;
    const auto m = mobius_from_utility_table(u);
    CHECK(m[0b011] == Rational(-1, 10));
    CHECK(m[0b001] == Rational(1, 5));

    // reconstruction identity
    for (ProjectMask s = 0; s < 8; ++s) {
        Rational sum = 0;
        for_each_submask(s, [&](ProjectMask c) { sum += m[c]; });
        CHECK(sum == u[s]);
    }
}

TEST_CASE("mobius_from_utility_table: additive tables have no interactions") {
    std::vector<Rational> u(16);
    const Rational singles[4] = {Rational(1), Rational(2), Rational(5, 2), Rational(7, 3)};
    for (ProjectMask s = 0; s < 16; ++s)
        for_each_member(s, [&](std::uint32_t i) { u[s] += singles[i]; });
    const auto m = mobius_from_utility_table(u);
    for (ProjectMask s = 0; s < 16; ++s)
        if (mask_size(s) >= 2) CHECK(m[s] == 0);
}

TEST_CASE("mobius_from_utility_table: inversion round-trip on random tables") {
    std::mt19937_64 rng(555);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Rational> u(8);
        for (ProjectMask s = 1; s < 8; ++s)
            u[s] = Rational(static_cast<std::int64_t>(rng() % 200),
                            static_cast<std::int64_t>(1 + rng() % 7));
        const auto m = mobius_from_utility_table(u);
        for (ProjectMask s = 0; s < 8; ++s) {
            Rational sum = 0;
            for_each_submask(s, [&](ProjectMask c) { sum += m[c]; });
            CHECK(sum == u[s]);
        }
    }
    CHECK_THROWS_AS(mobius_from_utility_table(std::vector<Rational>(7)), std::invalid_argument);
}

TEST_CASE("interaction_report on the worked example") {
    const Scenario s = example1();
    const SynergyModel model = build_model(s, 2);
    const auto records = interaction_report(model, s, 2, 0);
    REQUIRE(!records.empty());

    bool saw_ab = false, saw_cd = false;
    for (const auto& r : records) {
        if (r.subset == ids(s, {"A", "B"})) {
            saw_ab = true;
            CHECK(r.classification == InteractionClass::Positive);
            CHECK(r.transform == Rational(15, 16));
        }
        if (r.subset == ids(s, {"C", "D"})) {
            saw_cd = true;
            CHECK(r.classification == InteractionClass::Negative);
            CHECK(r.transform == -1);
        }
    }
    CHECK(saw_ab);
    CHECK(saw_cd);
    CHECK(records.front().subset == ids(s, {"C", "D"}));  // |m| = 1 tops the list

    // threshold above every |raw term|
    CHECK(interaction_report(model, s, 2, Rational(100)).empty());

    // no interactions at k = 1
    const SynergyModel k1 = build_model(s, 1);
    CHECK(interaction_report(k1, s, 3, 0).empty());
}

TEST_CASE("unseen subsets cannot influence satisfactions") {
    const Scenario s = example1();
    const SynergyModel clean = build_model(s, 2);
    SynergyModel corrupted = build_model(s, 2);
    corrupted.debug_override_transform(ids(s, {"C", "D"}), Rational(999));  // r({C,D}) = 0

    const ProjectMask limit = ProjectMask{1} << s.projects.size();
    for (ProjectMask bundle = 0; bundle < limit; ++bundle) {
        if (subset_cost(s, bundle) > s.budget) continue;
        for (std::size_t voter = 0; voter < s.ballots.size(); ++voter)
            CHECK(satisfaction(clean, s, voter, bundle) ==
                  satisfaction(corrupted, s, voter, bundle));
    }
}

TEST_CASE("binding guard rejects foreign scenarios") {
    const Scenario a = example1();
    const Scenario b = build_scenario(5, {{"x", 2}}, {{"v1", {"x"}}});
    const SynergyModel model = build_model(a, 2);
    CHECK_THROWS_AS(utility_um(model, b, mask_bit(0)), std::logic_error);
}

TEST_CASE("concurrent lazy lookups agree") {
    const Scenario s = example1();
    const SynergyModel model = build_model(s, std::nullopt);
    const ProjectMask full = s.all_projects_mask();
    const Rational expected = naive_um(s, std::nullopt, full);

    std::vector<std::thread> threads;
    std::vector<Rational> results(8);
    for (int t = 0; t < 8; ++t)
        threads.emplace_back([&, t] { results[t] = model.utility(full); });
    for (auto& th : threads) th.join();
    for (const auto& r : results) CHECK(r == expected);
}

TEST_CASE("monotonicity repair above the additivity bound") {
    // one {a,b,c} ballot plus three solo voters per project: r(a)=r(b)=r(c)=2/5,
    // r(pair)=1/10; with costs (1,9,9) both pairs through a clip to -3/5, so the
    // triple needs the floor repair 1/5 at k=2 to keep u_M monotone.
    Scenario s;
    s.budget = 19;
    s.meta["budget"] = "19";
    s.projects = {Project{"a", "", 1, {}}, Project{"b", "", 9, {}}, Project{"c", "", 9, {}}};
    auto add_ballot = [&](const char* voter, ProjectMask mask) {
        Ballot b;
        b.voter_id = voter;
        b.mask = mask;
        b.approvals = mask_members(mask);
        s.ballots.push_back(std::move(b));
    };
    add_ballot("trio", 0b111);
    add_ballot("a1", 0b001);
    add_ballot("a2", 0b001);
    add_ballot("a3", 0b001);
    add_ballot("b1", 0b010);
    add_ballot("b2", 0b010);
    add_ballot("b3", 0b010);
    add_ballot("c1", 0b100);
    add_ballot("c2", 0b100);
    add_ballot("c3", 0b100);
    s = validate(s, ValidationPolicy::Strict);

    const SynergyModel model = build_model(s, 2);
    CHECK(model.transform(0b011) == Rational(-3, 5));
    CHECK(model.transform(0b101) == Rational(-3, 5));
    CHECK(model.transform(0b111) == Rational(1, 5));  // repair, not plain zero
    CHECK(model.transform(0b111) == naive_mobius(s, 2, 0b111));
    CHECK(model.utility(0b111) == naive_um(s, 2, 0b111));
    CHECK(model.utility(0b111) >= model.utility(0b110));
    CHECK(model.utility(0b111) == Rational(423, 25));

    // the full pipeline stays oracle-exact in the repaired region
    for (Aggregator agg : {Aggregator::Sum, Aggregator::Min, Aggregator::Product}) {
        const SolveReport bb = branch_and_bound(model, s, agg);
        const SolveReport bf = brute_force(model, s, agg);
        CHECK(compare_scores(agg, bb.score, bf.score) == 0);
        CHECK(bb.bundle.mask == bf.bundle.mask);
    }
}
