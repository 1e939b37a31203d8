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
#include "capire/policy.h"
#include "test_support.h"

#include "doctest.h"

#include <memory>

using namespace capire;

namespace
{

struct Graphs {
    std::shared_ptr<const CurriculumGraph> base;
    std::shared_ptr<const CurriculumGraph> a1;
};

Graphs toy_graphs()
{
    auto base = std::make_shared<const CurriculumGraph>(test::toy_graph());
    RedesignSpec spec;
    spec.edges_removed.push_back({"C", "D"});
    auto a1 = std::make_shared<const CurriculumGraph>(apply_redesign(*base, spec));
    return {base, a1};
}

bool all_zero(const std::vector<double>& v)
{
    for (auto x : v) {
        if (x != 0.0) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("scenario ids")
{
    CHECK(parse_scenario_id("A0B0C0") == PolicyScenario{false, false, false});
    CHECK(parse_scenario_id("A1B1C1") == PolicyScenario{true, true, true});
    CHECK(parse_scenario_id("A1B0C1").id() == "A1B0C1");
    for (auto bad : {"A2B0C0", "a0b0c0", "A0B0C", "A0B0C00", "B0A0C0", ""}) {
        CHECK_THROWS_AS(parse_scenario_id(bad), InputError);
    }
}

TEST_CASE("factorial order")
{
    auto all = enumerate_factorial();
    REQUIRE(all.size() == 8);
    CHECK(all[0].id() == "A0B0C0");
    CHECK(all[1].id() == "A0B0C1");
    CHECK(all[3].id() == "A0B1C1");
    CHECK(all[4].id() == "A1B0C0");
    CHECK(all[7].id() == "A1B1C1");
}

TEST_CASE("status quo has no modifiers")
{
    auto g = toy_graphs();
    auto e = effects(parse_scenario_id("A0B0C0"), PolicyParams{}, g.base, g.a1);
    CHECK(e.graph == g.base);
    CHECK_FALSE(e.redesigned);
    CHECK(all_zero(e.pass_logit_boost));
    CHECK(e.exam_conversion_multiplier == 1.0);
    CHECK(e.friction_scale == 1.0);
    CHECK(e.stress_relief_for(Group::vulnerable) == 0.0);
    CHECK(e.belonging_gain_for(Group::stable) == 0.0);
}

TEST_CASE("B1 boosts backbone courses")
{
    auto g = toy_graphs();
    PolicyParams p;
    auto e = effects(parse_scenario_id("A0B1C0"), p, g.base, g.a1);
    CHECK(e.graph == g.base);
    auto idx = [&](const char* id) { return static_cast<std::size_t>(g.base->index_of(id)); };
    CHECK(e.pass_logit_boost[idx("A")] == p.b1_pass_logit_boost);
    CHECK(e.pass_logit_boost[idx("B")] == p.b1_pass_logit_boost);
    CHECK(e.pass_logit_boost[idx("C")] == 0.0);
    CHECK(e.pass_logit_boost[idx("D")] == p.b1_pass_logit_boost);
    CHECK(e.exam_conversion_multiplier > 1.0);
    CHECK(e.stress_relief_for(Group::stable) == p.b1_stress_relief);

    p.b1_target = TargetCourses{false, {"C"}};
    e           = effects(parse_scenario_id("A0B1C0"), p, g.base, g.a1);
    CHECK(e.pass_logit_boost[idx("A")] == 0.0);
    CHECK(e.pass_logit_boost[idx("C")] == p.b1_pass_logit_boost);
}

TEST_CASE("C1 acts on latent states only")
{
    auto g = toy_graphs();
    PolicyParams p;
    auto e = effects(parse_scenario_id("A0B0C1"), p, g.base, g.a1);
    CHECK(all_zero(e.pass_logit_boost));
    CHECK(e.exam_conversion_multiplier == 1.0);
    CHECK(e.stress_relief_for(Group::stable) == doctest::Approx(p.c1_stress_relief));
    CHECK(e.stress_relief_for(Group::vulnerable) ==
          doctest::Approx(p.c1_vulnerable_multiplier * p.c1_stress_relief));
    CHECK(e.belonging_gain_for(Group::vulnerable) ==
          doctest::Approx(p.c1_vulnerable_multiplier * p.c1_belonging_gain));
}

TEST_CASE("A1 selects the redesigned graph")
{
    auto g = toy_graphs();
    auto e = effects(parse_scenario_id("A1B0C0"), PolicyParams{}, g.base, g.a1);
    CHECK(e.graph == g.a1);
    CHECK(e.redesigned);
    CHECK_THROWS_AS(effects(parse_scenario_id("A1B0C0"), PolicyParams{}, g.base, nullptr), InputError);
    CHECK_NOTHROW(effects(parse_scenario_id("A0B1C1"), PolicyParams{}, g.base, nullptr));
}

TEST_CASE("single-bit flips never weaken a modifier")
{
    auto g = toy_graphs();
    PolicyParams p;
    for (const auto& s : enumerate_factorial()) {
        auto lo = effects(s, p, g.base, g.a1);
        for (int bit = 0; bit < 3; ++bit) {
            auto t = s;
            bool& b = bit == 0 ? t.a : (bit == 1 ? t.b : t.c);
            if (b) {
                continue;
            }
            b       = true;
            auto hi = effects(t, p, g.base, g.a1);
            for (std::size_t i = 0; i < lo.pass_logit_boost.size(); ++i) {
                CHECK(hi.pass_logit_boost[i] >= lo.pass_logit_boost[i]);
            }
            CHECK(hi.exam_conversion_multiplier >= lo.exam_conversion_multiplier);
            CHECK(hi.friction_scale <= lo.friction_scale);
            for (auto grp : {Group::vulnerable, Group::stable}) {
                CHECK(hi.stress_relief_for(grp) >= lo.stress_relief_for(grp));
                CHECK(hi.belonging_gain_for(grp) >= lo.belonging_gain_for(grp));
            }
        }
    }
}

TEST_CASE("policy parameter files")
{
    auto p = load_policy_params(test::data_file("policy_params.csv"));
    CHECK(parse_policy_params(to_key_values(p)) == p);
    CHECK_THROWS_AS(parse_policy_params({{"b1_conversion_multiplier", "0.5"}}), InputError);
    CHECK_THROWS_AS(parse_policy_params({{"c1_stress_relief", "-0.1"}}), InputError);
    CHECK_THROWS_AS(parse_policy_params({{"b1_target", "everything"}}), InputError);
    CHECK_THROWS_AS(parse_policy_params({{"b2_boost", "1"}}), InputError);
    auto listed = parse_policy_params({{"b1_target", "list:CAL1 FIS1"}});
    CHECK_FALSE(listed.b1_target.backbone);
    CHECK(listed.b1_target.ids == std::vector<std::string>{"CAL1", "FIS1"});
}
