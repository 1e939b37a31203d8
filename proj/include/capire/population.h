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
#ifndef CAPIRE_POPULATION_H
#define CAPIRE_POPULATION_H

#include "capire/course_set.h"
#include "capire/curriculum.h"
#include "capire/rng.h"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace capire
{

enum class Group
{
    vulnerable,
    stable,
};

std::string_view to_string(Group g);
Group parse_group(std::string_view text);

/// Student type: performance shift, hazard sensitivity and initial latent states.
struct Archetype {
    std::string id;
    Group group               = Group::stable;
    double proportion         = 1.0;
    double pass_logit_shift   = 0.0;
    double hazard_sensitivity = 1.0;
    double stress0_mean       = 0.5;
    double stress0_sd         = 0.0;
    double belonging0_mean    = 0.5;
    double belonging0_sd      = 0.0;
    int max_load              = 4;

    bool operator==(const Archetype&) const = default;
};

using ArchetypeTable = std::vector<Archetype>;

/// Throws InputError unless proportions sum to 1 (+-1e-9), sensitivities are
/// positive and loads are at least 1.
void validate_archetypes(const ArchetypeTable& table);
ArchetypeTable parse_archetypes(std::string_view csv);
ArchetypeTable load_archetypes(const std::filesystem::path& path);
std::string format_archetypes(const ArchetypeTable& table);

enum class Terminal
{
    active,
    dropped,
    graduated,
};

struct AgentState {
    int agent_id = 0;
    Archetype archetype;
    CourseSet approved;
    CourseSet pending; ///< coursework passed, final exam outstanding
    std::array<std::uint8_t, max_courses> fail_count{};
    double stress      = 0.0;
    double belonging   = 0.0;
    int semester       = 0; ///< last completed semester
    Terminal terminal  = Terminal::active;
    int exit_semester  = 0;

    CourseStatus status(CourseIndex c) const;
    std::vector<CourseStatus> status_vector(int n_courses) const;
    bool active() const
    {
        return terminal == Terminal::active;
    }

    bool operator==(const AgentState&) const = default;
};

inline double clamp01(double x)
{
    return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
}

/// Fresh agent: nothing taken, latent states drawn as clamped normals.
AgentState init_agent(const Archetype& archetype, int agent_id, const CounterRng& rng);

/// Archetype head-counts by largest remainder (ties to table order).
std::vector<int> archetype_counts(const ArchetypeTable& table, int n_students);

/// Cohort of `n_students` agents with ids 0..n-1; agent i draws from
/// CounterRng(seed, replication, i).
std::vector<AgentState> sample_cohort(const ArchetypeTable& table, int n_students, std::uint64_t seed,
                                      std::uint64_t replication);

} // namespace capire

#endif // CAPIRE_POPULATION_H
