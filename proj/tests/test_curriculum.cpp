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
#include "capire/curriculum.h"
#include "capire/error.h"
#include "test_support.h"

#include "doctest.h"

#include <random>

using namespace capire;
using capire::test::toy_graph;

TEST_CASE("load_curriculum builds the toy graph")
{
    auto g = toy_graph();
    CHECK(g.size() == 4);
    CHECK(g.edge_count() == 4);
    CHECK(g.total_credits() == 16);
    CHECK(course_ids(g, g.graduation_feeders()) == std::vector<std::string>{"D"});
    CHECK(course_ids(g, g.backbone()) == std::vector<std::string>{"A", "B", "D"});
    CHECK(g.in_degree(g.index_of("D")) == 2);
    CHECK(g.out_degree(g.index_of("A")) == 2);
    CHECK(g.out_degree(g.index_of("D")) == 0); // the graduation sink is not counted
    CHECK(g.baseline_chain_length() == 3);
}

TEST_CASE("load_curriculum rejects invalid input")
{
    const std::string courses = capire::read_file(capire::test::fixture("toy_courses.csv"));
    const std::string edges   = capire::read_file(capire::test::fixture("toy_edges.csv"));

    SUBCASE("cycle names its nodes")
    {
        try {
            load_curriculum(courses, edges + "D,A\n");
            FAIL("expected a cycle error");
        }
        catch (const CycleError& e) {
            std::string msg = e.what();
            CHECK(msg.find("A") != std::string::npos);
            CHECK(msg.find("D") != std::string::npos);
            CHECK((msg.find("B") != std::string::npos || msg.find("C") != std::string::npos));
            CHECK(msg == "cycle detected: A -> B -> D -> A");
        }
    }
    SUBCASE("self loop")
    {
        CHECK_THROWS_AS(load_curriculum(courses, edges + "B,B\n"), CycleError);
    }
    SUBCASE("duplicate id")
    {
        CHECK_THROWS_AS(load_curriculum(courses + "A,Again,1,2,0\n", edges), InputError);
    }
    SUBCASE("unknown endpoint")
    {
        CHECK_THROWS_WITH_AS(load_curriculum(courses, edges + "A,Z\n"), doctest::Contains("unknown course 'Z'"),
                             InputError);
    }
    SUBCASE("empty course set")
    {
        CHECK_THROWS_AS(load_curriculum("course_id,name,semester,credits,backbone\n", "prereq_id,course_id\n"),
                        InputError);
    }
    SUBCASE("duplicate edge")
    {
        CHECK_THROWS_AS(load_curriculum(courses, edges + "A,B\n"), InputError);
    }
    SUBCASE("bad header")
    {
        CHECK_THROWS_AS(load_curriculum("id,name\nA,x\n", edges), InputError);
    }
    SUBCASE("semester outside the plan")
    {
        CHECK_THROWS_AS(load_curriculum(courses + "E,Late,13,2,0\n", edges), InputError);
    }
    SUBCASE("zero credits")
    {
        CHECK_THROWS_AS(load_curriculum(courses + "E,Free,2,0,0\n", edges), InputError);
    }
}

TEST_CASE("satisfied_for_enrolment accepts regular-pending prerequisites")
{
    auto g = toy_graph();
    std::vector<CourseStatus> status(4, CourseStatus::untaken);
    CHECK(satisfied_for_enrolment(g, status, "A"));
    CHECK_FALSE(satisfied_for_enrolment(g, status, "B"));

    status[0] = CourseStatus::approved;
    CHECK_FALSE(satisfied_for_enrolment(g, status, "D"));
    CHECK(satisfied_for_enrolment(g, status, "B"));

    status[1] = CourseStatus::regular_pending;
    status[2] = CourseStatus::approved;
    CHECK(satisfied_for_enrolment(g, status, "D"));

    status[2] = CourseStatus::failed;
    CHECK_FALSE(satisfied_for_enrolment(g, status, "D"));

    CHECK_THROWS_AS(satisfied_for_enrolment(g, status, "Q"), InputError);
}

TEST_CASE("satisfied_for_enrolment is monotone in status upgrades")
{
    auto g = toy_graph();
    const CourseStatus levels[] = {CourseStatus::untaken, CourseStatus::regular_pending, CourseStatus::approved};
    // every status assignment over three levels, and every single-course upgrade of it
    for (int code = 0; code < 81; ++code) {
        std::vector<CourseStatus> s(4);
        int rest = code;
        for (auto& x : s) {
            x = levels[rest % 3];
            rest /= 3;
        }
        for (std::size_t k = 0; k < 4; ++k) {
            if (s[k] == CourseStatus::approved) {
                continue;
            }
            auto up = s;
            up[k]   = s[k] == CourseStatus::untaken ? CourseStatus::regular_pending : CourseStatus::approved;
            for (CourseIndex c = 0; c < 4; ++c) {
                if (satisfied_for_enrolment(g, s, c)) {
                    CHECK(satisfied_for_enrolment(g, up, c));
                }
            }
        }
    }
}

TEST_CASE("apply_redesign")
{
    auto g = toy_graph();

    SUBCASE("removing C->D leaves D with prerequisite B only")
    {
        RedesignSpec spec;
        spec.edges_removed = {{"C", "D"}};
        auto r             = apply_redesign(g, spec);
        CHECK(course_ids(r, r.prerequisites(r.index_of("D"))) == std::vector<std::string>{"B"});
        CHECK(r.edge_count() == 3);
        CHECK(g.edge_count() == 4); // base graph untouched
        CHECK(course_ids(r, r.graduation_feeders()) == std::vector<std::string>{"C", "D"});
    }
    SUBCASE("empty spec is the identity")
    {
        CHECK(apply_redesign(g, RedesignSpec{}) == g);
    }
    SUBCASE("errors")
    {
        RedesignSpec missing;
        missing.edges_removed = {{"B", "C"}};
        CHECK_THROWS_AS(apply_redesign(g, missing), InputError);

        RedesignSpec duplicate;
        duplicate.edges_added = {{"A", "B"}};
        CHECK_THROWS_AS(apply_redesign(g, duplicate), InputError);

        RedesignSpec cycle;
        cycle.edges_added = {{"D", "A"}};
        CHECK_THROWS_AS(apply_redesign(g, cycle), CycleError);

        RedesignSpec bad_semester;
        bad_semester.semester_reassignments = {{"A", 0}};
        CHECK_THROWS_AS(apply_redesign(g, bad_semester), InputError);
    }
    SUBCASE("inverse spec restores the original graph")
    {
        RedesignSpec spec;
        spec.edges_removed          = {{"C", "D"}, {"A", "B"}};
        spec.edges_added            = {{"B", "C"}};
        spec.semester_reassignments = {{"C", 3}, {"A", 2}};
        auto r = apply_redesign(g, spec);
        CHECK_FALSE(r == g);

        RedesignSpec inverse;
        inverse.edges_removed          = spec.edges_added;
        inverse.edges_added            = spec.edges_removed;
        inverse.semester_reassignments = {{"C", 2}, {"A", 1}};
        CHECK(apply_redesign(r, inverse) == g);
    }
    SUBCASE("redesign files parse")
    {
        auto spec = parse_redesign("op,prereq_id,course_id\nremove,C,D\nadd,B,C\nmodular,,D\n",
                                   "course_id,new_semester\nC,3\n");
        CHECK(spec.edges_removed.size() == 1);
        CHECK(spec.edges_added.size() == 1);
        CHECK(spec.semester_reassignments.at("C") == 3);
        auto r = apply_redesign(g, spec);
        CHECK(course_ids(r, r.modular_assessment()) == std::vector<std::string>{"D"});
        CHECK_THROWS_AS(parse_redesign("op,prereq_id,course_id\nswap,A,B\n"), InputError);
    }
}

TEST_CASE("bottleneck_set")
{
    CHECK(course_ids(toy_graph(), bottleneck_set(toy_graph(), 2, 0.0)) == std::vector<std::string>{"D"});
    auto chain = test::chain_graph(3);
    CHECK(course_ids(chain, bottleneck_set(chain, 2, 0.34)) == std::vector<std::string>{"B"});
    CHECK(bottleneck_set(toy_graph(), 1000, 0.0).empty());
    CHECK(bottleneck_set(chain, 1000, 0.0).empty());

    // toy betweenness: B and C each carry half of the A -> D shortest paths
    auto bc = betweenness_centrality(toy_graph());
    CHECK(bc == std::vector<double>{0.0, 0.5, 0.5, 0.0});
    // quantile ties at 0.5 resolve by id
    CHECK(course_ids(toy_graph(), bottleneck_set(toy_graph(), 1000, 0.25)) == std::vector<std::string>{"B"});
}

TEST_CASE("betweenness matches path enumeration on random DAGs")
{
    std::mt19937_64 rng(20260517);
    for (int trial = 0; trial < 200; ++trial) {
        auto dag      = test::random_dag(rng, 9);
        auto g        = test::to_graph(dag);
        auto expected = test::oracle_betweenness(dag);
        auto actual   = betweenness_centrality(g);
        for (int i = 0; i < dag.n; ++i) {
            CHECK(actual[static_cast<std::size_t>(g.index_of(test::node_name(i)))] ==
                  doctest::Approx(expected[static_cast<std::size_t>(i)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("shipped curriculum")
{
    auto g = load_curriculum_files(test::data_file("courses.csv"), test::data_file("edges.csv"));
    CHECK(g.size() == 34);
    CHECK(g.edge_count() == 53);

    auto spec = load_redesign_files(test::data_file("redesign_a1.csv"), test::data_file("reassign.csv"));
    auto a1   = apply_redesign(g, spec);
    CHECK(a1.edge_count() < 53);
    auto first_semester_credits = [](const CurriculumGraph& graph) {
        int total = 0;
        for (const auto& c : graph.courses()) {
            total += c.semester == 1 ? c.credits : 0;
        }
        return total;
    };
    CHECK(first_semester_credits(a1) < first_semester_credits(g));
}
