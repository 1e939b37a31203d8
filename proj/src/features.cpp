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
#include "capire/features.h"
#include "capire/error.h"

namespace capire
{

namespace
{

double ratio(int num, int den)
{
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

int blocked_credits(const CurriculumGraph& graph, CourseSet approved)
{
    int total = 0;
    (graph.all() - approved).for_each([&](CourseIndex c) {
        if (!graph.prerequisites(c).is_subset_of(approved)) {
            total += graph.course(c).credits;
        }
    });
    return total;
}

double distance_to_graduation(const CurriculumGraph& graph, CourseSet approved)
{
    return ratio(remaining_chain_length(graph, approved), graph.baseline_chain_length());
}

double backbone_completion(const CurriculumGraph& graph, CourseSet approved)
{
    return ratio((approved & graph.backbone()).size(), graph.backbone().size());
}

double bottleneck_approval_ratio(const CurriculumGraph& graph, CourseSet approved)
{
    return ratio((approved & graph.bottlenecks()).size(), graph.bottlenecks().size());
}

double prerequisites_met_ratio(const CurriculumGraph& graph, CourseSet approved)
{
    int met = 0;
    approved.for_each([&](CourseIndex c) {
        met += graph.out_degree(c);
    });
    return ratio(met, static_cast<int>(graph.edge_count()));
}

double mean_in_degree(const CurriculumGraph& graph, CourseSet approved)
{
    int sum = 0;
    approved.for_each([&](CourseIndex c) {
        sum += graph.in_degree(c);
    });
    return ratio(sum, approved.size());
}

double mean_out_degree(const CurriculumGraph& graph, CourseSet approved)
{
    int sum = 0;
    approved.for_each([&](CourseIndex c) {
        sum += graph.out_degree(c);
    });
    return ratio(sum, approved.size());
}

StructuralSnapshot compute_snapshot(const CurriculumGraph& graph, CourseSet approved)
{
    if (!approved.is_subset_of(graph.all())) {
        throw InputError("approved set names a course outside the curriculum");
    }
    StructuralSnapshot s;
    s.backbone_completion       = backbone_completion(graph, approved);
    s.blocked_credits           = blocked_credits(graph, approved);
    s.distance_to_graduation    = distance_to_graduation(graph, approved);
    s.bottleneck_approval_ratio = bottleneck_approval_ratio(graph, approved);
    s.prerequisites_met_ratio   = prerequisites_met_ratio(graph, approved);
    s.mean_in_degree_approved   = mean_in_degree(graph, approved);
    s.mean_out_degree_approved  = mean_out_degree(graph, approved);
    return s;
}

} // namespace capire
