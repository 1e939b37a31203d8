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
#ifndef CAPIRE_CURRICULUM_H
#define CAPIRE_CURRICULUM_H

#include "capire/course_set.h"

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace capire
{

struct Course {
    std::string id;
    std::string name;
    int semester = 1; ///< nominal semester in the plan, 1-based
    int credits  = 1;
    bool backbone = false;

    bool operator==(const Course&) const = default;
};

/// Prerequisite relation `prereq -> course`.
struct PrereqEdge {
    std::string prereq;
    std::string course;

    auto operator<=>(const PrereqEdge&) const = default;
};

/// Rule selecting the structurally central courses (bottlenecks).
struct BottleneckRule {
    int min_in_degree           = 3;
    double betweenness_quantile = 0.1;

    bool operator==(const BottleneckRule&) const = default;
};

/// Per-course progress of one student.
enum class CourseStatus
{
    untaken,
    failed, ///< not approved, failed at least once
    regular_pending, ///< coursework passed, final exam pending
    approved,
};

/**
 * Curriculum as a directed acyclic prerequisite graph.
 *
 * Courses are indexed in input order. A virtual graduation sink is fed by
 * every course without dependents; it never appears in course counts.
 * Instances are immutable and validated on construction.
 */
class CurriculumGraph
{
public:
    static constexpr int default_plan_length  = 12;
    static constexpr std::string_view grad_node = "__graduation__";

    /// Validates and builds. Throws InputError or CycleError.
    CurriculumGraph(std::vector<Course> courses, std::vector<PrereqEdge> edges,
                    int plan_length = default_plan_length, BottleneckRule rule = {},
                    std::set<std::string> modular_assessment = {});

    int size() const
    {
        return static_cast<int>(m_courses.size());
    }
    const std::vector<Course>& courses() const
    {
        return m_courses;
    }
    const Course& course(CourseIndex c) const
    {
        return m_courses[static_cast<std::size_t>(c)];
    }
    std::optional<CourseIndex> find(std::string_view id) const;
    /// Throws InputError for an unknown id.
    CourseIndex index_of(std::string_view id) const;

    CourseSet prerequisites(CourseIndex c) const
    {
        return m_prereqs[static_cast<std::size_t>(c)];
    }
    CourseSet dependents(CourseIndex c) const
    {
        return m_dependents[static_cast<std::size_t>(c)];
    }
    int in_degree(CourseIndex c) const
    {
        return prerequisites(c).size();
    }
    /// Out-degree among courses; edges into the graduation sink are not counted.
    int out_degree(CourseIndex c) const
    {
        return dependents(c).size();
    }

    std::size_t edge_count() const
    {
        return m_edge_count;
    }
    /// Edges as id pairs, sorted.
    std::vector<PrereqEdge> edges() const;

    CourseSet all() const
    {
        return CourseSet::first_n(size());
    }
    CourseSet backbone() const
    {
        return m_backbone;
    }
    CourseSet bottlenecks() const
    {
        return m_bottlenecks;
    }
    /// Courses with no dependents; each has an edge into the graduation sink.
    CourseSet graduation_feeders() const
    {
        return m_feeders;
    }
    CourseSet modular_assessment() const
    {
        return m_modular;
    }
    const std::vector<CourseIndex>& topological_order() const
    {
        return m_topo;
    }

    int plan_length() const
    {
        return m_plan_length;
    }
    int total_credits() const
    {
        return m_total_credits;
    }
    const BottleneckRule& bottleneck_rule() const
    {
        return m_rule;
    }
    /// Shortest remaining chain length from the empty approved set (normaliser of the distance indicator).
    int baseline_chain_length() const
    {
        return m_baseline_chain;
    }

    bool operator==(const CurriculumGraph& other) const;

private:
    std::vector<Course> m_courses;
    std::vector<CourseSet> m_prereqs;
    std::vector<CourseSet> m_dependents;
    std::vector<CourseIndex> m_topo;
    std::size_t m_edge_count = 0;
    int m_plan_length        = default_plan_length;
    int m_total_credits      = 0;
    int m_baseline_chain     = 0;
    BottleneckRule m_rule;
    CourseSet m_backbone;
    CourseSet m_bottlenecks;
    CourseSet m_feeders;
    CourseSet m_modular;
};

/// Changes applied by a curriculum redesign.
struct RedesignSpec {
    std::vector<PrereqEdge> edges_removed;
    std::vector<PrereqEdge> edges_added;
    std::map<std::string, int> semester_reassignments;
    std::set<std::string> modular_assessment;

    bool empty() const
    {
        return edges_removed.empty() && edges_added.empty() && semester_reassignments.empty() &&
               modular_assessment.empty();
    }
};

/// Parse `courses.csv` / `edges.csv` contents.
CurriculumGraph load_curriculum(std::string_view courses_csv, std::string_view edges_csv,
                                int plan_length = CurriculumGraph::default_plan_length, BottleneckRule rule = {});
CurriculumGraph load_curriculum_files(const std::filesystem::path& courses_csv, const std::filesystem::path& edges_csv,
                                      int plan_length = CurriculumGraph::default_plan_length,
                                      BottleneckRule rule = {});

/// Parse `redesign_a1.csv` (`op,prereq_id,course_id`) and optional `reassign.csv`
/// (`course_id,new_semester`). Rows with op `modular` flag `course_id` for modular assessment.
RedesignSpec parse_redesign(std::string_view redesign_csv, std::string_view reassign_csv = {});
RedesignSpec load_redesign_files(const std::filesystem::path& redesign_csv,
                                 const std::filesystem::path& reassign_csv = {});

/// True iff every prerequisite of `course` is regular_pending or approved.
bool satisfied_for_enrolment(const CurriculumGraph& graph, std::span<const CourseStatus> status, CourseIndex course);
bool satisfied_for_enrolment(const CurriculumGraph& graph, std::span<const CourseStatus> status,
                             std::string_view course_id);

/// New graph with the redesign applied; `graph` is untouched. Throws on missing
/// removals, duplicate additions, unknown courses, or a resulting cycle.
CurriculumGraph apply_redesign(const CurriculumGraph& graph, const RedesignSpec& spec);

/// Directed node betweenness over course nodes (graduation sink excluded), unnormalised.
std::vector<double> betweenness_centrality(const CurriculumGraph& graph);

/// Courses with in-degree >= min_in_degree, or whose betweenness ranks within the
/// top floor(quantile * n) courses (ties by course id).
CourseSet bottleneck_set(const CurriculumGraph& graph, int min_in_degree, double betweenness_quantile);

/**
 * Fewest unapproved courses on any prerequisite chain that ends at the
 * graduation sink and starts at a course whose prerequisites all lie in
 * `approved`. Zero when every course is approved.
 */
int remaining_chain_length(const CurriculumGraph& graph, CourseSet approved);

CourseSet make_course_set(const CurriculumGraph& graph, std::span<const std::string> ids);
std::vector<std::string> course_ids(const CurriculumGraph& graph, CourseSet set);

} // namespace capire

#endif // CAPIRE_CURRICULUM_H
