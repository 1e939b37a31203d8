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
#include "capire/population.h"
#include "capire/error.h"
#include "capire/table_io.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace capire
{

std::string_view to_string(Group g)
{
    return g == Group::vulnerable ? "vulnerable" : "stable";
}

Group parse_group(std::string_view text)
{
    if (text == "vulnerable") {
        return Group::vulnerable;
    }
    if (text == "stable") {
        return Group::stable;
    }
    throw InputError("unknown archetype group '" + std::string(text) + "'");
}

void validate_archetypes(const ArchetypeTable& table)
{
    if (table.empty()) {
        throw InputError("archetype table is empty");
    }
    double total = 0.0;
    for (const auto& a : table) {
        if (a.proportion < 0.0) {
            throw InputError("archetype " + a.id + ": negative proportion");
        }
        if (!(a.hazard_sensitivity > 0.0)) {
            throw InputError("archetype " + a.id + ": hazard_sensitivity must be > 0");
        }
        if (a.max_load < 1) {
            throw InputError("archetype " + a.id + ": max_load must be >= 1");
        }
        if (a.stress0_sd < 0.0 || a.belonging0_sd < 0.0) {
            throw InputError("archetype " + a.id + ": negative standard deviation");
        }
        total += a.proportion;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw InputError("archetype proportions sum to " + format_double(total) + ", expected 1");
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (table[i].id == table[j].id) {
                throw InputError("duplicate archetype id '" + table[i].id + "'");
            }
        }
    }
}

ArchetypeTable parse_archetypes(std::string_view csv)
{
    auto t = parse_table(csv, "archetypes.csv");
    require_header(t, {"archetype_id", "group", "proportion", "pass_logit_shift", "hazard_sensitivity", "stress0_mean",
                       "stress0_sd", "belonging0_mean", "belonging0_sd", "max_load"});
    ArchetypeTable table;
    for (const auto& row : t.rows) {
        Archetype a;
        a.id                 = row[0];
        a.group              = parse_group(row[1]);
        a.proportion         = parse_double(row[2], "proportion");
        a.pass_logit_shift   = parse_double(row[3], "pass_logit_shift");
        a.hazard_sensitivity = parse_double(row[4], "hazard_sensitivity");
        a.stress0_mean       = parse_double(row[5], "stress0_mean");
        a.stress0_sd         = parse_double(row[6], "stress0_sd");
        a.belonging0_mean    = parse_double(row[7], "belonging0_mean");
        a.belonging0_sd      = parse_double(row[8], "belonging0_sd");
        a.max_load           = static_cast<int>(parse_int(row[9], "max_load"));
        table.push_back(std::move(a));
    }
    validate_archetypes(table);
    return table;
}

ArchetypeTable load_archetypes(const std::filesystem::path& path)
{
    return parse_archetypes(read_file(path));
}

std::string format_archetypes(const ArchetypeTable& table)
{
    std::string out = "archetype_id,group,proportion,pass_logit_shift,hazard_sensitivity,stress0_mean,stress0_sd,"
                      "belonging0_mean,belonging0_sd,max_load\n";
    for (const auto& a : table) {
        out += a.id + "," + std::string(to_string(a.group)) + "," + format_double(a.proportion) + "," +
               format_double(a.pass_logit_shift) + "," + format_double(a.hazard_sensitivity) + "," +
               format_double(a.stress0_mean) + "," + format_double(a.stress0_sd) + "," +
               format_double(a.belonging0_mean) + "," + format_double(a.belonging0_sd) + "," +
               std::to_string(a.max_load) + "\n";
    }
    return out;
}

CourseStatus AgentState::status(CourseIndex c) const
{
    if (approved.contains(c)) {
        return CourseStatus::approved;
    }
    if (pending.contains(c)) {
        return CourseStatus::regular_pending;
    }
    return fail_count[static_cast<std::size_t>(c)] > 0 ? CourseStatus::failed : CourseStatus::untaken;
}

std::vector<CourseStatus> AgentState::status_vector(int n_courses) const
{
    std::vector<CourseStatus> out(static_cast<std::size_t>(n_courses));
    for (int c = 0; c < n_courses; ++c) {
        out[static_cast<std::size_t>(c)] = status(c);
    }
    return out;
}

AgentState init_agent(const Archetype& archetype, int agent_id, const CounterRng& rng)
{
    AgentState agent;
    agent.agent_id  = agent_id;
    agent.archetype = archetype;
    agent.stress    = clamp01(archetype.stress0_mean + archetype.stress0_sd * rng.normal(0, DrawPhase::initial, 0));
    agent.belonging =
        clamp01(archetype.belonging0_mean + archetype.belonging0_sd * rng.normal(0, DrawPhase::initial, 1));
    return agent;
}

std::vector<int> archetype_counts(const ArchetypeTable& table, int n_students)
{
    validate_archetypes(table);
    if (n_students < 1) {
        throw InputError("cohort size must be >= 1");
    }
    std::vector<int> counts(table.size());
    std::vector<double> remainder(table.size());
    int assigned = 0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        double exact = table[i].proportion * n_students;
        counts[i]    = static_cast<int>(std::floor(exact + 1e-9));
        remainder[i] = exact - counts[i];
        assigned += counts[i];
    }
    std::vector<std::size_t> order(table.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return remainder[a] > remainder[b];
    });
    for (std::size_t k = 0; assigned < n_students; ++k) {
        ++counts[order[k % order.size()]];
        ++assigned;
    }
    return counts;
}

std::vector<AgentState> sample_cohort(const ArchetypeTable& table, int n_students, std::uint64_t seed,
                                      std::uint64_t replication)
{
    auto counts = archetype_counts(table, n_students);
    std::vector<AgentState> cohort;
    cohort.reserve(static_cast<std::size_t>(n_students));
    int id = 0;
    for (std::size_t a = 0; a < table.size(); ++a) {
        for (int k = 0; k < counts[a]; ++k, ++id) {
            cohort.push_back(init_agent(table[a], id, CounterRng(seed, replication, static_cast<std::uint64_t>(id))));
        }
    }
    return cohort;
}

} // namespace capire
