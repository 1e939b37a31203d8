/*
 * Copyright (C) 2026 The capire authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "capire/error.h"
#include "capire/population.h"
#include "test_support.h"

#include "doctest.h"

using namespace capire;

namespace
{

Archetype make(std::string id, Group g, double p, double sd = 0.0)
{
    Archetype a;
    a.id           = std::move(id);
    a.group        = g;
    a.proportion   = p;
    a.stress0_mean = 0.6;
    a.stress0_sd   = sd;
    return a;
}

} // namespace

TEST_CASE("largest remainder composition")
{
    ArchetypeTable t{make("a", Group::vulnerable, 0.6), make("b", Group::stable, 0.4)};
    CHECK(archetype_counts(t, 10) == std::vector<int>{6, 4});

    // 7 * (1/3) leaves equal remainders; ties go to table order
    ArchetypeTable thirds{make("a", Group::stable, 1.0 / 3), make("b", Group::stable, 1.0 / 3),
                          make("c", Group::stable, 1.0 / 3)};
    CHECK(archetype_counts(thirds, 7) == std::vector<int>{3, 2, 2});
}

TEST_CASE("shipped archetype table")
{
    auto t      = load_archetypes(test::data_file("archetypes.csv"));
    auto cohort = sample_cohort(t, 1343, 20250101, 0);
    REQUIRE(cohort.size() == 1343);
    auto counts = archetype_counts(t, 1343);
    int total   = 0;
    for (auto c : counts) {
        total += c;
    }
    CHECK(total == 1343);
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        CHECK(cohort[i].agent_id == static_cast<int>(i));
        CHECK(cohort[i].stress >= 0.0);
        CHECK(cohort[i].stress <= 1.0);
        CHECK(cohort[i].belonging >= 0.0);
        CHECK(cohort[i].belonging <= 1.0);
    }
}

TEST_CASE("degenerate latent sampling")
{
    auto a            = make("only", Group::stable, 1.0);
    a.belonging0_mean = 0.42;
    auto cohort       = sample_cohort({a}, 5, 1, 0);
    REQUIRE(cohort.size() == 5);
    for (const auto& agent : cohort) {
        CHECK(agent.stress == 0.6);
        CHECK(agent.belonging == 0.42);
        CHECK(agent.semester == 0);
        CHECK(agent.active());
        CHECK(agent.approved.empty());
        CHECK(agent.pending.empty());
    }
}

TEST_CASE("wide latent spread stays clamped")
{
    auto a = make("v", Group::vulnerable, 1.0, 5.0);
    for (const auto& agent : sample_cohort({a}, 2000, 3, 1)) {
        CHECK(agent.stress >= 0.0);
        CHECK(agent.stress <= 1.0);
    }
}

TEST_CASE("sampling is reproducible")
{
    auto t = load_archetypes(test::data_file("archetypes.csv"));
    CHECK(sample_cohort(t, 200, 9, 4) == sample_cohort(t, 200, 9, 4));
    CHECK(sample_cohort(t, 200, 9, 4) != sample_cohort(t, 200, 9, 5));
    auto a = t.front();
    CHECK(init_agent(a, 7, CounterRng(1, 2, 7)) == init_agent(a, 7, CounterRng(1, 2, 7)));
}

TEST_CASE("archetype table validation")
{
    CHECK_THROWS_AS(validate_archetypes({make("a", Group::stable, 0.5)}), InputError);
    auto bad               = make("a", Group::stable, 1.0);
    bad.hazard_sensitivity = 0.0;
    CHECK_THROWS_AS(validate_archetypes({bad}), InputError);
    bad          = make("a", Group::stable, 1.0);
    bad.max_load = 0;
    CHECK_THROWS_AS(validate_archetypes({bad}), InputError);
    CHECK_THROWS_AS(parse_group("fragile"), InputError);

    auto t = load_archetypes(test::data_file("archetypes.csv"));
    CHECK(parse_archetypes(format_archetypes(t)) == t);
}
