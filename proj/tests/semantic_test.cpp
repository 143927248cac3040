/*
   Copyright 2026 The rlst Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "oracles.hpp"
#include "rlst/error.hpp"
#include "rlst/rng.hpp"
#include "rlst/semantic.hpp"
#include "rlst/sentence.hpp"
#include "rlst/tensor.hpp"
#include "rlst/transport.hpp"

namespace {

using rlst::Rng;
using rlst::Sentence;
using rlst::Style;
using rlst::Tensor;
using rlst::TransportPlan;
using rlst::WordDistribution;

struct Instance {
    std::vector<double> supply;
    std::vector<double> demand;
    Tensor cost;
};

Instance random_instance(Rng& rng, std::size_t max_side) {
    Instance inst;
    const std::size_t m = 1 + rng.below(max_side);
    const std::size_t n = 1 + rng.below(max_side);
    double supply_total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        inst.supply.push_back(rng.uniform(0.1, 1.0));
        supply_total += inst.supply.back();
    }
    double demand_total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        inst.demand.push_back(rng.uniform(0.1, 1.0));
        demand_total += inst.demand.back();
    }
    for (double& d : inst.demand) d *= supply_total / demand_total;
    inst.cost = Tensor({m, n});
    for (double& c : inst.cost.values()) c = rng.uniform(0.0, 2.0);
    return inst;
}

void check_marginals(const TransportPlan& plan,
                     std::span<const double> supply,
                     std::span<const double> demand, double tol) {
    const std::size_t m = supply.size();
    const std::size_t n = demand.size();
    for (std::size_t r = 0; r < m; ++r) {
        double row_sum = 0.0;
        for (std::size_t c = 0; c < n; ++c) row_sum += plan.flows.at(r, c);
        CHECK(std::abs(row_sum - supply[r]) <= tol);
    }
    for (std::size_t c = 0; c < n; ++c) {
        double col_sum = 0.0;
        for (std::size_t r = 0; r < m; ++r) col_sum += plan.flows.at(r, c);
        CHECK(std::abs(col_sum - demand[c]) <= tol);
    }
    for (double f : plan.flows.values()) CHECK(f >= 0.0);
}

std::vector<std::size_t> random_bag(Rng& rng, std::size_t pool,
                                    std::size_t max_len) {
    const std::size_t len = 1 + rng.below(max_len);
    std::vector<std::size_t> bag;
    for (std::size_t k = 0; k < len; ++k) {
        bag.push_back(rlst::kReservedCount + rng.below(pool));
    }
    return bag;
}

/// Fixture table: tokens 4..7 sit far apart on separate axes, token 8 at the
/// origin, token 9 at distance 0.2 from token 8.
Tensor synonym_fixture_embeddings() {
    Tensor e({10, 50});
    for (std::size_t t = 4; t <= 7; ++t) e.at(t, t - 4) = 50.0;
    e.at(9, 4) = 0.2;
    return e;
}

}  // namespace

TEST_CASE("transport rejects malformed problems") {
    const Tensor cost({2, 2}, {1.0, 2.0, 3.0, 4.0});
    const std::vector<double> ok = {1.0, 1.0};

    CHECK_THROWS_AS(rlst::solve_transport({}, ok, cost), rlst::UsageError);
    CHECK_THROWS_AS(rlst::solve_transport(ok, {}, cost), rlst::UsageError);

    const std::vector<double> three = {1.0, 1.0, 1.0};
    CHECK_THROWS_AS(rlst::solve_transport(three, three, cost),
                    rlst::ConfigError);

    const std::vector<double> zero = {0.0, 2.0};
    CHECK_THROWS_AS(rlst::solve_transport(zero, ok, cost), rlst::UsageError);
    CHECK_THROWS_AS(rlst::solve_transport(ok, zero, cost), rlst::UsageError);

    const std::vector<double> heavy = {2.0, 1.0};
    CHECK_THROWS_AS(rlst::solve_transport(heavy, ok, cost), rlst::UsageError);

    const Tensor bad_cost({2, 2},
                          {1.0, std::numeric_limits<double>::quiet_NaN(), 3.0,
                           4.0});
    CHECK_THROWS_AS(rlst::solve_transport(ok, ok, bad_cost),
                    rlst::NumericalError);

    const std::vector<double> bad_supply = {
        std::numeric_limits<double>::infinity(), 1.0};
    CHECK_THROWS_AS(rlst::solve_transport(bad_supply, bad_supply, cost),
                    rlst::NumericalError);
}

TEST_CASE("transport solves forced and hand-checked instances exactly") {
    SUBCASE("single cell") {
        const Tensor cost({1, 1}, {7.0});
        const std::vector<double> one = {1.0};
        const TransportPlan plan = rlst::solve_transport(one, one, cost);
        CHECK(plan.total_cost == 7.0);
        CHECK(plan.flows.at(0, 0) == 1.0);
    }
    SUBCASE("single row is forced") {
        const Tensor cost({1, 2}, {2.0, 5.0});
        const std::vector<double> supply = {3.0};
        const std::vector<double> demand = {1.0, 2.0};
        const TransportPlan plan = rlst::solve_transport(supply, demand, cost);
        CHECK(plan.total_cost == 12.0);
        CHECK(plan.flows.at(0, 0) == 1.0);
        CHECK(plan.flows.at(0, 1) == 2.0);
    }
    SUBCASE("two by two needs one comparison") {
        const Tensor cost({2, 2}, {1.0, 4.0, 2.0, 1.0});
        const std::vector<double> supply = {1.0, 3.0};
        const std::vector<double> demand = {2.0, 2.0};
        const TransportPlan plan = rlst::solve_transport(supply, demand, cost);
        CHECK(plan.total_cost == 5.0);
        check_marginals(plan, supply, demand, 0.0);
    }
    SUBCASE("degenerate tie keeps the basis a tree") {
        const Tensor cost({2, 2}, {0.0, 1.0, 1.0, 0.0});
        const std::vector<double> unit = {1.0, 1.0};
        const TransportPlan plan = rlst::solve_transport(unit, unit, cost);
        CHECK(plan.total_cost == 0.0);
        CHECK(plan.flows.at(0, 0) == 1.0);
        CHECK(plan.flows.at(1, 1) == 1.0);
    }
    SUBCASE("degenerate start still pivots to the optimum") {
        const Tensor cost({2, 2}, {5.0, 1.0, 1.0, 5.0});
        const std::vector<double> unit = {1.0, 1.0};
        const TransportPlan plan = rlst::solve_transport(unit, unit, cost);
        CHECK(plan.total_cost == 2.0);
        CHECK(plan.flows.at(0, 1) == 1.0);
        CHECK(plan.flows.at(1, 0) == 1.0);
    }
}

TEST_CASE("transport matches the vertex-enumeration oracle on small instances") {
    Rng rng(2024);
    for (int trial = 0; trial < 150; ++trial) {
        const Instance inst = random_instance(rng, 3);
        const TransportPlan plan =
            rlst::solve_transport(inst.supply, inst.demand, inst.cost);
        const double oracle_cost =
            oracle::enumerate_transport_cost(inst.supply, inst.demand,
                                             inst.cost);
        CHECK(std::abs(plan.total_cost - oracle_cost) <= 1e-9);
        check_marginals(plan, inst.supply, inst.demand, 1e-9);
    }
}

TEST_CASE("transport matches the dense simplex oracle up to five by five") {
    Rng rng(4048);
    for (int trial = 0; trial < 60; ++trial) {
        const Instance inst = random_instance(rng, 5);
        const TransportPlan plan =
            rlst::solve_transport(inst.supply, inst.demand, inst.cost);
        const double oracle_cost =
            oracle::simplex_transport_cost(inst.supply, inst.demand,
                                           inst.cost);
        CHECK(std::abs(plan.total_cost - oracle_cost) <= 1e-9);
    }
}

TEST_CASE("ground distance is a Euclidean metric on embedding rows") {
    SUBCASE("three four five triangle") {
        const Tensor e({2, 2}, {0.0, 0.0, 3.0, 4.0});
        CHECK(rlst::ground_distance(0, 1, e) == 5.0);
    }
    SUBCASE("identity and exact symmetry") {
        Rng rng(7);
        const Tensor e = Tensor::uniform({6, 5}, rng, -1.0, 1.0);
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(rlst::ground_distance(i, i, e) == 0.0);
            for (std::size_t j = 0; j < 6; ++j) {
                CHECK(rlst::ground_distance(i, j, e) ==
                      rlst::ground_distance(j, i, e));
            }
        }
    }
    SUBCASE("out of range index") {
        const Tensor e({2, 2}, {0.0, 0.0, 3.0, 4.0});
        CHECK_THROWS_AS(rlst::ground_distance(0, 2, e), rlst::UsageError);
    }
}

TEST_CASE("word distribution counts into a canonical bag") {
    const std::vector<std::size_t> tokens = {5, 3, 5, 9, 3, 5};
    const WordDistribution d = rlst::word_distribution(tokens);
    REQUIRE(d.support == std::vector<std::size_t>{3, 5, 9});
    CHECK(d.weights[0] == 2.0 / 6.0);
    CHECK(d.weights[1] == 3.0 / 6.0);
    CHECK(d.weights[2] == 1.0 / 6.0);
    rlst::validate_distribution(d);

    SUBCASE("token order never changes the distribution") {
        Rng rng(99);
        std::vector<std::size_t> shuffled = tokens;
        for (int trial = 0; trial < 20; ++trial) {
            rng.shuffle(shuffled);
            const WordDistribution again = rlst::word_distribution(shuffled);
            CHECK(again.support == d.support);
            CHECK(again.weights == d.weights);
        }
    }
    SUBCASE("invariant violations are rejected") {
        CHECK_THROWS_AS(rlst::validate_distribution(WordDistribution{}),
                        rlst::UsageError);
        CHECK_THROWS_AS(
            rlst::validate_distribution(WordDistribution{{3, 3}, {0.5, 0.5}}),
            rlst::UsageError);
        CHECK_THROWS_AS(
            rlst::validate_distribution(WordDistribution{{5, 3}, {0.5, 0.5}}),
            rlst::UsageError);
        CHECK_THROWS_AS(
            rlst::validate_distribution(WordDistribution{{3, 5}, {1.5, -0.5}}),
            rlst::UsageError);
        CHECK_THROWS_AS(
            rlst::validate_distribution(WordDistribution{{3, 5}, {0.5, 0.4}}),
            rlst::UsageError);
        CHECK_THROWS_AS(
            rlst::validate_distribution(WordDistribution{{3}, {0.5, 0.5}}),
            rlst::UsageError);
    }
}

TEST_CASE("wmd basics and exact symmetry") {
    Rng rng(31);
    const Tensor e = Tensor::uniform({12, 4}, rng, -1.0, 1.0);

    SUBCASE("self distance is exactly zero") {
        for (int trial = 0; trial < 10; ++trial) {
            const WordDistribution d =
                rlst::word_distribution(random_bag(rng, 8, 6));
            CHECK(rlst::wmd(d, d, e) == 0.0);
        }
    }
    SUBCASE("disjoint singletons reduce to the ground distance") {
        const WordDistribution a{{4}, {1.0}};
        const WordDistribution b{{9}, {1.0}};
        CHECK(rlst::wmd(a, b, e) == rlst::ground_distance(4, 9, e));
    }
    SUBCASE("argument order is invisible, bit for bit") {
        for (int trial = 0; trial < 50; ++trial) {
            const WordDistribution a =
                rlst::word_distribution(random_bag(rng, 8, 6));
            const WordDistribution b =
                rlst::word_distribution(random_bag(rng, 8, 6));
            CHECK(rlst::wmd(a, b, e) == rlst::wmd(b, a, e));
        }
        // equal supports, mirrored weights: orientation decided by weights
        const WordDistribution a{{4, 5}, {0.25, 0.75}};
        const WordDistribution b{{4, 5}, {0.75, 0.25}};
        CHECK(rlst::wmd(a, b, e) == rlst::wmd(b, a, e));
    }
    SUBCASE("empty support is rejected") {
        const WordDistribution a{{4}, {1.0}};
        CHECK_THROWS_AS(rlst::wmd(a, WordDistribution{}, e), rlst::UsageError);
        CHECK_THROWS_AS(rlst::wmd(WordDistribution{}, a, e), rlst::UsageError);
    }
    SUBCASE("support outside the table is rejected") {
        const WordDistribution a{{4}, {1.0}};
        const WordDistribution far{{12}, {1.0}};
        CHECK_THROWS_AS(rlst::wmd(a, far, e), rlst::UsageError);
    }
    SUBCASE("plan marginals hold in both orientations") {
        const WordDistribution a{{9}, {1.0}};
        const WordDistribution b = rlst::word_distribution(
            std::vector<std::size_t>{4, 5, 5, 6});
        const TransportPlan ab = rlst::wmd_plan(a, b, e);
        REQUIRE(ab.flows.shape() == std::vector<std::size_t>{1, 3});
        check_marginals(ab, a.weights, b.weights, 1e-9);
        const TransportPlan ba = rlst::wmd_plan(b, a, e);
        REQUIRE(ba.flows.shape() == std::vector<std::size_t>{3, 1});
        check_marginals(ba, b.weights, a.weights, 1e-9);
        CHECK(ab.total_cost == ba.total_cost);
    }
}

TEST_CASE("wmd agrees with both oracles on random token bags") {
    Rng rng(555);
    const Tensor e = Tensor::uniform({12, 4}, rng, -1.0, 1.0);
    for (int trial = 0; trial < 80; ++trial) {
        const WordDistribution a =
            rlst::word_distribution(random_bag(rng, 3, 6));
        const WordDistribution b =
            rlst::word_distribution(random_bag(rng, 3, 6));
        Tensor cost({a.support.size(), b.support.size()});
        for (std::size_t r = 0; r < a.support.size(); ++r) {
            for (std::size_t c = 0; c < b.support.size(); ++c) {
                cost.at(r, c) =
                    rlst::ground_distance(a.support[r], b.support[c], e);
            }
        }
        const double value = rlst::wmd(a, b, e);
        CHECK(std::abs(value - oracle::enumerate_transport_cost(
                                   a.weights, b.weights, cost)) <= 1e-9);
    }
    for (int trial = 0; trial < 40; ++trial) {
        const WordDistribution a =
            rlst::word_distribution(random_bag(rng, 5, 9));
        const WordDistribution b =
            rlst::word_distribution(random_bag(rng, 5, 9));
        Tensor cost({a.support.size(), b.support.size()});
        for (std::size_t r = 0; r < a.support.size(); ++r) {
            for (std::size_t c = 0; c < b.support.size(); ++c) {
                cost.at(r, c) =
                    rlst::ground_distance(a.support[r], b.support[c], e);
            }
        }
        const double value = rlst::wmd(a, b, e);
        CHECK(std::abs(value - oracle::simplex_transport_cost(
                                   a.weights, b.weights, cost)) <= 1e-9);
    }
}

TEST_CASE("wmd satisfies the metric axioms on sampled distributions") {
    Rng rng(777);
    const Tensor e = Tensor::uniform({10, 4}, rng, -1.0, 1.0);
    int strict_positive = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const WordDistribution a =
            rlst::word_distribution(random_bag(rng, 6, 5));
        const WordDistribution b =
            rlst::word_distribution(random_bag(rng, 6, 5));
        const WordDistribution c =
            rlst::word_distribution(random_bag(rng, 6, 5));
        const double ab = rlst::wmd(a, b, e);
        const double bc = rlst::wmd(b, c, e);
        const double ac = rlst::wmd(a, c, e);
        CHECK(ab >= 0.0);
        CHECK(ac <= ab + bc + 1e-9);
        const bool same =
            a.support == b.support && a.weights == b.weights;
        if (same) {
            CHECK(ab == 0.0);
        } else if (ab > 0.0) {
            ++strict_positive;
        }
    }
    // distinct random distributions sit at strictly positive distance
    CHECK(strict_positive > 900);
}

TEST_CASE("semantic score rewards preserved content") {
    const Tensor e = synonym_fixture_embeddings();

    SUBCASE("identical sentences score exactly zero") {
        const Sentence s = rlst::frame({4, 5, 6, 7, 8}, Style::source);
        const Sentence g = rlst::frame({4, 5, 6, 7, 8}, Style::target);
        const rlst::SemanticScore score = rlst::semantic_score(g, s, e);
        CHECK(score.value == 0.0);
        CHECK_FALSE(score.degenerate);
    }
    SUBCASE("one synonym at distance 0.2 over five tokens scores -0.008") {
        const Sentence s = rlst::frame({4, 5, 6, 7, 8}, Style::source);
        const Sentence g = rlst::frame({4, 5, 6, 7, 9}, Style::target);
        const rlst::SemanticScore score = rlst::semantic_score(g, s, e);
        CHECK(std::abs(score.value - (-0.008)) <= 1e-12);
        CHECK_FALSE(score.degenerate);
    }
    SUBCASE("token order inside either sentence is invisible") {
        Rng rng(13);
        const std::vector<std::size_t> sc = {4, 5, 6, 7, 8};
        const std::vector<std::size_t> gc = {4, 5, 6, 7, 9};
        const double reference =
            rlst::semantic_score(rlst::frame(gc, Style::target),
                                 rlst::frame(sc, Style::source), e)
                .value;
        std::vector<std::size_t> sp = sc;
        std::vector<std::size_t> gp = gc;
        for (int trial = 0; trial < 20; ++trial) {
            rng.shuffle(sp);
            rng.shuffle(gp);
            const double shuffled =
                rlst::semantic_score(rlst::frame(gp, Style::target),
                                     rlst::frame(sp, Style::source), e)
                    .value;
            CHECK(shuffled == reference);
        }
    }
    SUBCASE("stopwords are filtered from both sides") {
        const Sentence s = rlst::frame({4, 5, 8}, Style::source);
        const Sentence g = rlst::frame({4, 5, 9}, Style::target);
        const std::vector<std::size_t> stop = {4};
        const rlst::SemanticScore filtered =
            rlst::semantic_score(g, s, e, stop);
        CHECK_FALSE(filtered.degenerate);
        const rlst::SemanticScore manual = rlst::semantic_score(
            rlst::frame({5, 9}, Style::target),
            rlst::frame({5, 8}, Style::source), e);
        CHECK(filtered.value == manual.value);
    }
    SUBCASE("a side emptied by filtering falls back and is flagged") {
        const Sentence s = rlst::frame({4, 5}, Style::source);
        const Sentence g = rlst::frame({4}, Style::target);
        const std::vector<std::size_t> stop = {4};
        const rlst::SemanticScore score = rlst::semantic_score(g, s, e, stop);
        CHECK(score.degenerate);
        const double expected = -rlst::ground_distance(4, 5, e);
        CHECK(score.value == expected);
    }
    SUBCASE("no content at all is an error") {
        const Sentence s = rlst::frame({4}, Style::source);
        const Sentence empty = rlst::frame({}, Style::target);
        CHECK_THROWS_AS(rlst::semantic_score(empty, s, e), rlst::UsageError);
    }
}
