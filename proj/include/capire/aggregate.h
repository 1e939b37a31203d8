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
#ifndef CAPIRE_AGGREGATE_H
#define CAPIRE_AGGREGATE_H

#include "capire/policy.h"
#include "capire/records.h"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace capire
{

/// Count, sum and sum of squares; merge is exact for counts and ordered for sums.
struct Moments {
    long long n  = 0;
    double sum   = 0.0;
    double sumsq = 0.0;

    void add(double x)
    {
        ++n;
        sum += x;
        sumsq += x * x;
    }
    void merge(const Moments& o)
    {
        n += o.n;
        sum += o.sum;
        sumsq += o.sumsq;
    }
    double mean() const;
    /// Sample standard deviation (n - 1); 0 for fewer than two values.
    double sd() const;
};

/// Histogram over small non-negative integers.
struct IntHistogram {
    std::vector<long long> counts;

    void add(int value);
    void merge(const IntHistogram& o);
    long long total() const;
    /// Lower median (the smaller middle value for even counts); 0 when empty.
    int lower_median() const;
};

/// Indicator summary over the agents observed at one semester.
struct SemesterSummary {
    std::array<Moments, StructuralSnapshot::field_count> indicators;
    IntHistogram blocked;

    void add(const StructuralSnapshot& s);
    void merge(const SemesterSummary& o);
    long long count() const
    {
        return indicators[0].n;
    }
};

struct GroupSummary {
    long long n_agents     = 0;
    long long n_graduated  = 0;
    long long n_hard_drops = 0;
    long long courses_sum  = 0;

    void merge(const GroupSummary& o);
};

/**
 * Streaming reduction of long records for one scenario.
 *
 * Feed one (scenario, replication) unit at a time with records grouped by
 * agent in semester order, then merge units in a fixed order; the result is
 * then independent of how units were produced.
 */
class ScenarioStats
{
public:
    explicit ScenarioStats(std::string scenario_id = {}, int horizon = 12);

    const std::string& scenario_id() const
    {
        return m_scenario_id;
    }
    int horizon() const
    {
        return m_horizon;
    }

    /// All records of one agent, semesters 1..exit without gaps.
    void add_agent(const LongRecord* first, std::size_t count);
    /// A whole unit: records sorted by agent then semester.
    void add_unit(const std::vector<LongRecord>& records);
    void merge(const ScenarioStats& other);

    long long n_agents() const
    {
        return m_courses.total();
    }
    double dropout_rate() const; ///< functional non-completion
    double hard_dropout_rate() const;
    double graduation_rate() const;
    double mean_courses() const;
    double std_courses() const;
    int median_courses() const;
    double mean_courses_by_rep() const;
    double mean_stress() const;
    double mean_belonging() const;
    /// Share of hard dropouts that left in semesters 1 or 2.
    double first_year_dropout_share() const;
    /// Share of hard dropouts with no approved course.
    double zero_course_dropout_share() const;

    /// Agents with a record at semester t (1-based).
    const SemesterSummary& survivors(int t) const;
    /// All agents, exited ones frozen at their exit state.
    const SemesterSummary& frozen(int t) const;
    const std::map<Group, GroupSummary>& groups() const
    {
        return m_groups;
    }
    const IntHistogram& courses() const
    {
        return m_courses;
    }

private:
    std::string m_scenario_id;
    int m_horizon;
    IntHistogram m_courses;
    Moments m_courses_moments;
    long long m_graduated   = 0;
    long long m_hard_drops  = 0;
    long long m_first_year  = 0;
    long long m_zero_course = 0;
    Moments m_stress;
    Moments m_belonging;
    std::map<int, Moments> m_reps; ///< courses per replication
    std::vector<SemesterSummary> m_survivors;
    std::vector<SemesterSummary> m_frozen;
    std::map<Group, GroupSummary> m_groups;
};

/// Scenario-level outcomes the factorial decomposition reads.
struct ScenarioOutcome {
    PolicyScenario scenario;
    double dropout_rate = 0.0;
    double mean_courses = 0.0;
};

struct FactorialEffects {
    std::array<double, 3> dropout{}; ///< A, B, C
    std::array<double, 3> courses{};

    bool operator==(const FactorialEffects&) const = default;
};

/// effect(X) = mean over the four X=1 cells minus mean over the four X=0 cells.
/// Throws InputError unless all eight cells appear exactly once.
FactorialEffects factorial_main_effects(const std::vector<ScenarioOutcome>& rows);
std::vector<ScenarioOutcome> parse_table2(std::string_view csv);

/// Sort into factorial order; throws if a scenario repeats.
std::vector<ScenarioStats> in_factorial_order(std::vector<ScenarioStats> stats);

std::string format_table2(const std::vector<ScenarioStats>& stats);
std::string format_table3(const std::vector<ScenarioStats>& stats, int t);
/// Table 3 with survivor counts and the frozen-state variant appended.
std::string format_table3_extended(const std::vector<ScenarioStats>& stats, int t);
std::string format_scenario_summary(const std::vector<ScenarioStats>& stats);
std::string format_factorial_effects(const FactorialEffects& effects);
std::string format_archetype_breakdown(const std::vector<ScenarioStats>& stats);
/// Per-scenario, per-semester backbone completion means (frozen state).
std::string format_figure1_series(const std::vector<ScenarioStats>& stats);

/// Writes every aggregate table into `out_dir`; returns the file names written.
std::vector<std::string> write_aggregates(const std::vector<ScenarioStats>& stats, const std::filesystem::path& out_dir,
                                          int snapshot_semester = 8);

/// Reduce a directory of record files (`<scenario>_<rep>.csv[.gz]`).
std::vector<ScenarioStats> aggregate_directory(const std::filesystem::path& records_dir, int horizon = 12);

} // namespace capire

#endif // CAPIRE_AGGREGATE_H
