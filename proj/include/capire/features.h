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
#ifndef CAPIRE_FEATURES_H
#define CAPIRE_FEATURES_H

#include "capire/curriculum.h"

#include <array>
#include <string_view>

namespace capire
{

/// The seven structural indicators of one student at one semester.
struct StructuralSnapshot {
    double backbone_completion       = 0.0;
    int blocked_credits              = 0;
    double distance_to_graduation    = 1.0;
    double bottleneck_approval_ratio = 0.0;
    double prerequisites_met_ratio   = 0.0;
    double mean_in_degree_approved   = 0.0;
    double mean_out_degree_approved  = 0.0;

    static constexpr std::size_t field_count = 7;
    static constexpr std::array<std::string_view, field_count> field_names = {
        "backbone_completion",     "blocked_credits",         "distance_to_graduation",  "bottleneck_approval_ratio",
        "prerequisites_met_ratio", "mean_in_degree_approved", "mean_out_degree_approved"};

    /// Field values in `field_names` order.
    std::array<double, field_count> values() const
    {
        return {backbone_completion,     static_cast<double>(blocked_credits), distance_to_graduation,
                bottleneck_approval_ratio, prerequisites_met_ratio,             mean_in_degree_approved,
                mean_out_degree_approved};
    }

    bool operator==(const StructuralSnapshot&) const = default;
};

// All indicators read only finally approved courses. `approved` need not be
// closed under prerequisites.

StructuralSnapshot compute_snapshot(const CurriculumGraph& graph, CourseSet approved);

/// Credits of unapproved courses with at least one unapproved prerequisite.
int blocked_credits(const CurriculumGraph& graph, CourseSet approved);

/// remaining_chain_length(approved) / remaining_chain_length(empty set).
double distance_to_graduation(const CurriculumGraph& graph, CourseSet approved);

double backbone_completion(const CurriculumGraph& graph, CourseSet approved);
double bottleneck_approval_ratio(const CurriculumGraph& graph, CourseSet approved);
/// Fraction of prerequisite edges whose tail is approved.
double prerequisites_met_ratio(const CurriculumGraph& graph, CourseSet approved);
double mean_in_degree(const CurriculumGraph& graph, CourseSet approved);
double mean_out_degree(const CurriculumGraph& graph, CourseSet approved);

} // namespace capire

#endif // CAPIRE_FEATURES_H
