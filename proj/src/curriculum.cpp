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
#include "capire/table_io.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace capire
{

namespace
{

std::vector<CourseIndex> topological_sort(const std::vector<CourseSet>& prereqs, const std::vector<CourseSet>& deps)
{
    const auto n = static_cast<int>(prereqs.size());
    std::vector<int> indeg(prereqs.size());
    for (int c = 0; c < n; ++c) {
        indeg[static_cast<std::size_t>(c)] = prereqs[static_cast<std::size_t>(c)].size();
    }
    // Kahn with smallest-index-first frontier so the order is reproducible.
    std::vector<CourseIndex> order;
    CourseSet ready;
    for (int c = 0; c < n; ++c) {
        if (indeg[static_cast<std::size_t>(c)] == 0) {
            ready.insert(c);
        }
    }
    while (!ready.empty()) {
        auto c = ready.indices().front();
        ready.erase(c);
        order.push_back(c);
        deps[static_cast<std::size_t>(c)].for_each([&](CourseIndex d) {
            if (--indeg[static_cast<std::size_t>(d)] == 0) {
                ready.insert(d);
            }
        });
    }
    return order;
}

/// Walks prerequisites inside the unsorted remainder until a node repeats.
std::vector<CourseIndex> find_cycle(const std::vector<CourseSet>& prereqs, CourseSet remainder)
{
    std::vector<CourseIndex> walk;
    std::vector<int> seen_at(prereqs.size(), -1);
    auto node = remainder.indices().front();
    while (seen_at[static_cast<std::size_t>(node)] < 0) {
        seen_at[static_cast<std::size_t>(node)] = static_cast<int>(walk.size());
        walk.push_back(node);
        node = (prereqs[static_cast<std::size_t>(node)] & remainder).indices().front();
    }
    std::vector<CourseIndex> cycle(walk.begin() + seen_at[static_cast<std::size_t>(node)], walk.end());
    // walk followed prerequisite links backwards; flip to prerequisite -> dependent order
    std::reverse(cycle.begin() + 1, cycle.end());
    cycle.push_back(cycle.front());
    return cycle;
}

} // namespace

CurriculumGraph::CurriculumGraph(std::vector<Course> courses, std::vector<PrereqEdge> edges, int plan_length,
                                 BottleneckRule rule, std::set<std::string> modular_assessment)
    : m_courses(std::move(courses))
    , m_plan_length(plan_length)
    , m_rule(rule)
{
    if (m_courses.empty()) {
        throw InputError("curriculum has no courses");
    }
    if (m_courses.size() > static_cast<std::size_t>(max_courses)) {
        throw InputError("curriculum has " + std::to_string(m_courses.size()) + " courses; at most " +
                         std::to_string(max_courses) + " are supported");
    }
    if (plan_length < 1) {
        throw InputError("plan length must be positive");
    }
    for (std::size_t i = 0; i < m_courses.size(); ++i) {
        const auto& c = m_courses[i];
        if (c.id.empty()) {
            throw InputError("course with empty id");
        }
        if (c.id == grad_node) {
            throw InputError("course id '" + c.id + "' is reserved");
        }
        if (c.semester < 1 || c.semester > plan_length) {
            throw InputError("course " + c.id + ": semester " + std::to_string(c.semester) + " outside 1.." +
                             std::to_string(plan_length));
        }
        if (c.credits < 1) {
            throw InputError("course " + c.id + ": credits must be >= 1");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (m_courses[j].id == c.id) {
                throw InputError("duplicate course id '" + c.id + "'");
            }
        }
        m_total_credits += c.credits;
        if (c.backbone) {
            m_backbone.insert(static_cast<CourseIndex>(i));
        }
    }

    m_prereqs.assign(m_courses.size(), CourseSet{});
    m_dependents.assign(m_courses.size(), CourseSet{});
    for (const auto& e : edges) {
        auto u = find(e.prereq);
        auto v = find(e.course);
        if (!u || !v) {
            throw InputError("edge " + e.prereq + " -> " + e.course + " names unknown course '" +
                             (!u ? e.prereq : e.course) + "'");
        }
        if (m_prereqs[static_cast<std::size_t>(*v)].contains(*u)) {
            throw InputError("duplicate edge " + e.prereq + " -> " + e.course);
        }
        if (*u == *v) {
            throw CycleError("cycle detected: " + e.prereq + " -> " + e.course);
        }
        m_prereqs[static_cast<std::size_t>(*v)].insert(*u);
        m_dependents[static_cast<std::size_t>(*u)].insert(*v);
        ++m_edge_count;
    }

    m_topo = topological_sort(m_prereqs, m_dependents);
    if (m_topo.size() != m_courses.size()) {
        auto remainder = all();
        for (auto c : m_topo) {
            remainder.erase(c);
        }
        std::string msg = "cycle detected: ";
        auto cycle      = find_cycle(m_prereqs, remainder);
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            msg += (i ? " -> " : "") + course(cycle[i]).id;
        }
        throw CycleError(msg);
    }

    for (int c = 0; c < size(); ++c) {
        if (m_dependents[static_cast<std::size_t>(c)].empty()) {
            m_feeders.insert(c);
        }
    }
    for (const auto& id : modular_assessment) {
        m_modular.insert(index_of(id));
    }
    m_bottlenecks    = bottleneck_set(*this, rule.min_in_degree, rule.betweenness_quantile);
    m_baseline_chain = remaining_chain_length(*this, CourseSet{});
}

std::optional<CourseIndex> CurriculumGraph::find(std::string_view id) const
{
    for (std::size_t i = 0; i < m_courses.size(); ++i) {
        if (m_courses[i].id == id) {
            return static_cast<CourseIndex>(i);
        }
    }
    return std::nullopt;
}

CourseIndex CurriculumGraph::index_of(std::string_view id) const
{
    if (auto c = find(id)) {
        return *c;
    }
    throw InputError("unknown course '" + std::string(id) + "'");
}

std::vector<PrereqEdge> CurriculumGraph::edges() const
{
    std::vector<PrereqEdge> out;
    out.reserve(m_edge_count);
    for (int v = 0; v < size(); ++v) {
        prerequisites(v).for_each([&](CourseIndex u) {
            out.push_back({course(u).id, course(v).id});
        });
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool CurriculumGraph::operator==(const CurriculumGraph& other) const
{
    return m_courses == other.m_courses && m_prereqs == other.m_prereqs && m_plan_length == other.m_plan_length &&
           m_rule == other.m_rule && m_modular == other.m_modular;
}

CurriculumGraph load_curriculum(std::string_view courses_csv, std::string_view edges_csv, int plan_length,
                                BottleneckRule rule)
{
    auto ct = parse_table(courses_csv, "courses.csv");
    require_header(ct, {"course_id", "name", "semester", "credits", "backbone"});
    std::vector<Course> courses;
    for (const auto& row : ct.rows) {
        Course c;
        c.id       = row[0];
        c.name     = row[1];
        c.semester = static_cast<int>(parse_int(row[2], "semester of " + row[0]));
        c.credits  = static_cast<int>(parse_int(row[3], "credits of " + row[0]));
        c.backbone = parse_bool(row[4], "backbone of " + row[0]);
        courses.push_back(std::move(c));
    }
    auto et = parse_table(edges_csv, "edges.csv");
    require_header(et, {"prereq_id", "course_id"});
    std::vector<PrereqEdge> edges;
    for (const auto& row : et.rows) {
        edges.push_back({row[0], row[1]});
    }
    return CurriculumGraph(std::move(courses), std::move(edges), plan_length, rule);
}

CurriculumGraph load_curriculum_files(const std::filesystem::path& courses_csv, const std::filesystem::path& edges_csv,
                                      int plan_length, BottleneckRule rule)
{
    return load_curriculum(read_file(courses_csv), read_file(edges_csv), plan_length, rule);
}

RedesignSpec parse_redesign(std::string_view redesign_csv, std::string_view reassign_csv)
{
    RedesignSpec spec;
    auto t = parse_table(redesign_csv, "redesign_a1.csv");
    require_header(t, {"op", "prereq_id", "course_id"});
    for (const auto& row : t.rows) {
        if (row[0] == "remove") {
            spec.edges_removed.push_back({row[1], row[2]});
        }
        else if (row[0] == "add") {
            spec.edges_added.push_back({row[1], row[2]});
        }
        else if (row[0] == "modular") {
            spec.modular_assessment.insert(row[2]);
        }
        else {
            throw InputError("redesign_a1.csv: unknown op '" + row[0] + "'");
        }
    }
    if (!trim(reassign_csv).empty()) {
        auto r = parse_table(reassign_csv, "reassign.csv");
        require_header(r, {"course_id", "new_semester"});
        for (const auto& row : r.rows) {
            auto sem = static_cast<int>(parse_int(row[1], "new_semester of " + row[0]));
            if (!spec.semester_reassignments.emplace(row[0], sem).second) {
                throw InputError("reassign.csv: course '" + row[0] + "' reassigned twice");
            }
        }
    }
    return spec;
}

RedesignSpec load_redesign_files(const std::filesystem::path& redesign_csv, const std::filesystem::path& reassign_csv)
{
    return parse_redesign(read_file(redesign_csv), reassign_csv.empty() ? std::string{} : read_file(reassign_csv));
}

bool satisfied_for_enrolment(const CurriculumGraph& graph, std::span<const CourseStatus> status, CourseIndex course)
{
    if (course < 0 || course >= graph.size()) {
        throw InputError("course index out of range");
    }
    if (status.size() != static_cast<std::size_t>(graph.size())) {
        throw InputError("status map must cover every course");
    }
    bool ok = true;
    graph.prerequisites(course).for_each([&](CourseIndex p) {
        auto s = status[static_cast<std::size_t>(p)];
        ok     = ok && (s == CourseStatus::regular_pending || s == CourseStatus::approved);
    });
    return ok;
}

bool satisfied_for_enrolment(const CurriculumGraph& graph, std::span<const CourseStatus> status,
                             std::string_view course_id)
{
    return satisfied_for_enrolment(graph, status, graph.index_of(course_id));
}

CurriculumGraph apply_redesign(const CurriculumGraph& graph, const RedesignSpec& spec)
{
    auto edges = graph.edges();
    for (const auto& e : spec.edges_removed) {
        auto it = std::find(edges.begin(), edges.end(), e);
        if (it == edges.end()) {
            throw InputError("redesign removes nonexistent edge " + e.prereq + " -> " + e.course);
        }
        edges.erase(it);
    }
    for (const auto& e : spec.edges_added) {
        if (std::find(edges.begin(), edges.end(), e) != edges.end()) {
            throw InputError("redesign adds duplicate edge " + e.prereq + " -> " + e.course);
        }
        edges.push_back(e);
    }
    auto courses = graph.courses();
    for (const auto& [id, sem] : spec.semester_reassignments) {
        courses[static_cast<std::size_t>(graph.index_of(id))].semester = sem;
    }
    std::set<std::string> modular;
    for (auto c : graph.modular_assessment().indices()) {
        modular.insert(graph.course(c).id);
    }
    for (const auto& id : spec.modular_assessment) {
        graph.index_of(id);
        modular.insert(id);
    }
    return CurriculumGraph(std::move(courses), std::move(edges), graph.plan_length(), graph.bottleneck_rule(),
                           std::move(modular));
}

std::vector<double> betweenness_centrality(const CurriculumGraph& graph)
{
    // Brandes accumulation over unweighted directed edges.
    const auto n = static_cast<std::size_t>(graph.size());
    std::vector<double> bc(n, 0.0);
    std::vector<std::vector<CourseIndex>> pred(n);
    std::vector<double> sigma(n);
    std::vector<double> delta(n);
    std::vector<int> dist(n);
    for (CourseIndex s = 0; s < graph.size(); ++s) {
        std::vector<CourseIndex> stack;
        for (std::size_t i = 0; i < n; ++i) {
            pred[i].clear();
            sigma[i] = 0.0;
            dist[i]  = -1;
            delta[i] = 0.0;
        }
        sigma[static_cast<std::size_t>(s)] = 1.0;
        dist[static_cast<std::size_t>(s)]  = 0;
        std::deque<CourseIndex> queue{s};
        while (!queue.empty()) {
            auto v = queue.front();
            queue.pop_front();
            stack.push_back(v);
            graph.dependents(v).for_each([&](CourseIndex w) {
                auto wi = static_cast<std::size_t>(w);
                auto vi = static_cast<std::size_t>(v);
                if (dist[wi] < 0) {
                    dist[wi] = dist[vi] + 1;
                    queue.push_back(w);
                }
                if (dist[wi] == dist[vi] + 1) {
                    sigma[wi] += sigma[vi];
                    pred[wi].push_back(v);
                }
            });
        }
        while (!stack.empty()) {
            auto w = stack.back();
            stack.pop_back();
            auto wi = static_cast<std::size_t>(w);
            for (auto v : pred[wi]) {
                auto vi = static_cast<std::size_t>(v);
                delta[vi] += sigma[vi] / sigma[wi] * (1.0 + delta[wi]);
            }
            if (w != s) {
                bc[wi] += delta[wi];
            }
        }
    }
    return bc;
}

CourseSet bottleneck_set(const CurriculumGraph& graph, int min_in_degree, double betweenness_quantile)
{
    CourseSet out;
    for (CourseIndex c = 0; c < graph.size(); ++c) {
        if (graph.in_degree(c) >= min_in_degree) {
            out.insert(c);
        }
    }
    auto top = static_cast<int>(std::floor(std::clamp(betweenness_quantile, 0.0, 1.0) * graph.size() + 1e-9));
    if (top > 0) {
        auto bc = betweenness_centrality(graph);
        std::vector<CourseIndex> order(static_cast<std::size_t>(graph.size()));
        std::iota(order.begin(), order.end(), 0);
        // compare on a fixed grid so accumulation round-off cannot reorder true ties
        auto key = [&](CourseIndex c) {
            return std::llround(bc[static_cast<std::size_t>(c)] * 1e6);
        };
        std::sort(order.begin(), order.end(), [&](CourseIndex a, CourseIndex b) {
            if (key(a) != key(b)) {
                return key(a) > key(b);
            }
            return graph.course(a).id < graph.course(b).id;
        });
        for (int i = 0; i < top; ++i) {
            out.insert(order[static_cast<std::size_t>(i)]);
        }
    }
    return out;
}

int remaining_chain_length(const CurriculumGraph& graph, CourseSet approved)
{
    const auto& topo = graph.topological_order();
    std::vector<int> cost(static_cast<std::size_t>(graph.size()), 0);
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
        auto c    = *it;
        int own   = approved.contains(c) ? 0 : 1;
        int after = 0;
        if (!graph.dependents(c).empty()) {
            after = std::numeric_limits<int>::max();
            graph.dependents(c).for_each([&](CourseIndex d) {
                after = std::min(after, cost[static_cast<std::size_t>(d)]);
            });
        }
        cost[static_cast<std::size_t>(c)] = own + after;
    }
    int best = std::numeric_limits<int>::max();
    for (CourseIndex c = 0; c < graph.size(); ++c) {
        if (graph.prerequisites(c).is_subset_of(approved)) {
            best = std::min(best, cost[static_cast<std::size_t>(c)]);
        }
    }
    return best;
}

CourseSet make_course_set(const CurriculumGraph& graph, std::span<const std::string> ids)
{
    CourseSet out;
    for (const auto& id : ids) {
        out.insert(graph.index_of(id));
    }
    return out;
}

std::vector<std::string> course_ids(const CurriculumGraph& graph, CourseSet set)
{
    std::vector<std::string> out;
    set.for_each([&](CourseIndex c) {
        out.push_back(graph.course(c).id);
    });
    return out;
}

} // namespace capire
