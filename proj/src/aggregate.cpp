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
#include "capire/aggregate.h"

#include "capire/error.h"
#include "capire/table_io.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <regex>
#include <set>

namespace capire
{

double Moments::mean() const
{
    return n > 0 ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

double Moments::sd() const
{
    if (n < 2) {
        return 0.0;
    }
    const double m   = sum / static_cast<double>(n);
    const double var = (sumsq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

void IntHistogram::add(int value)
{
    if (value < 0) {
        throw InputError("histogram value must be >= 0");
    }
    if (static_cast<std::size_t>(value) >= counts.size()) {
        counts.resize(static_cast<std::size_t>(value) + 1, 0);
    }
    ++counts[static_cast<std::size_t>(value)];
}

void IntHistogram::merge(const IntHistogram& o)
{
    if (o.counts.size() > counts.size()) {
        counts.resize(o.counts.size(), 0);
    }
    for (std::size_t i = 0; i < o.counts.size(); ++i) {
        counts[i] += o.counts[i];
    }
}

long long IntHistogram::total() const
{
    long long n = 0;
    for (auto c : counts) {
        n += c;
    }
    return n;
}

int IntHistogram::lower_median() const
{
    const long long n = total();
    if (n == 0) {
        return 0;
    }
    const long long rank = (n + 1) / 2; // 1-based rank of the lower middle value
    long long seen       = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        seen += counts[i];
        if (seen >= rank) {
            return static_cast<int>(i);
        }
    }
    return static_cast<int>(counts.size()) - 1;
}

void SemesterSummary::add(const StructuralSnapshot& s)
{
    auto v = s.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        indicators[i].add(v[i]);
    }
    blocked.add(s.blocked_credits);
}

void SemesterSummary::merge(const SemesterSummary& o)
{
    for (std::size_t i = 0; i < indicators.size(); ++i) {
        indicators[i].merge(o.indicators[i]);
    }
    blocked.merge(o.blocked);
}

void GroupSummary::merge(const GroupSummary& o)
{
    n_agents += o.n_agents;
    n_graduated += o.n_graduated;
    n_hard_drops += o.n_hard_drops;
    courses_sum += o.courses_sum;
}

ScenarioStats::ScenarioStats(std::string scenario_id, int horizon)
    : m_scenario_id(std::move(scenario_id))
    , m_horizon(horizon)
    , m_survivors(static_cast<std::size_t>(horizon))
    , m_frozen(static_cast<std::size_t>(horizon))
{
    if (horizon < 1) {
        throw InputError("horizon must be >= 1");
    }
}

void ScenarioStats::add_agent(const LongRecord* first, std::size_t count)
{
    if (count == 0) {
        throw InputError("agent without records");
    }
    const auto& last = first[count - 1];
    auto where       = [&] {
        return "scenario " + first->scenario_id + " replication " + std::to_string(first->replication) + " agent " +
               std::to_string(first->agent_id);
    };
    if (m_scenario_id.empty()) {
        m_scenario_id = first->scenario_id;
    }
    for (std::size_t i = 0; i < count; ++i) {
        const auto& r = first[i];
        if (r.scenario_id != m_scenario_id || r.agent_id != first->agent_id || r.replication != first->replication) {
            throw InputError(where() + ": mixed record identifiers");
        }
        if (r.semester != static_cast<int>(i) + 1) {
            throw InputError(where() + ": semester " + std::to_string(r.semester) + " out of sequence");
        }
        if (r.semester > m_horizon) {
            throw InputError(where() + ": semester beyond horizon " + std::to_string(m_horizon));
        }
        if (i + 1 < count && r.terminal_event != TerminalEvent::none) {
            throw InputError(where() + ": records continue after exit");
        }
        if (i > 0 && r.n_approved_total < first[i - 1].n_approved_total) {
            throw InputError(where() + ": approved count decreases");
        }
    }
    if (last.terminal_event == TerminalEvent::none && last.semester != m_horizon) {
        throw InputError(where() + ": trajectory stops at semester " + std::to_string(last.semester) +
                         " without an exit");
    }

    const int courses = last.n_approved_total;
    m_courses.add(courses);
    m_courses_moments.add(courses);
    m_reps[last.replication].add(courses);
    m_stress.add(last.stress);
    m_belonging.add(last.belonging);

    auto& g = m_groups[last.group];
    ++g.n_agents;
    g.courses_sum += courses;
    if (last.terminal_event == TerminalEvent::graduation) {
        ++m_graduated;
        ++g.n_graduated;
    }
    else if (last.terminal_event == TerminalEvent::dropout) {
        ++m_hard_drops;
        ++g.n_hard_drops;
        m_first_year += last.semester <= 2 ? 1 : 0;
        m_zero_course += courses == 0 ? 1 : 0;
    }

    for (std::size_t i = 0; i < count; ++i) {
        m_survivors[i].add(first[i].snapshot);
    }
    for (std::size_t t = 0; t < static_cast<std::size_t>(m_horizon); ++t) {
        m_frozen[t].add(first[std::min(t, count - 1)].snapshot);
    }
}

void ScenarioStats::add_unit(const std::vector<LongRecord>& records)
{
    std::size_t begin = 0;
    int previous      = std::numeric_limits<int>::min();
    while (begin < records.size()) {
        std::size_t end = begin + 1;
        while (end < records.size() && records[end].agent_id == records[begin].agent_id) {
            ++end;
        }
        if (records[begin].agent_id <= previous) {
            throw InputError("records of agent " + std::to_string(records[begin].agent_id) +
                             " are not contiguous or not in agent order");
        }
        previous = records[begin].agent_id;
        add_agent(records.data() + begin, end - begin);
        begin = end;
    }
}

void ScenarioStats::merge(const ScenarioStats& o)
{
    if (m_scenario_id.empty()) {
        m_scenario_id = o.m_scenario_id;
    }
    if (o.m_scenario_id != m_scenario_id && !o.m_scenario_id.empty()) {
        throw InputError("cannot merge " + o.m_scenario_id + " into " + m_scenario_id);
    }
    if (o.m_horizon != m_horizon) {
        throw InputError("cannot merge statistics with different horizons");
    }
    m_courses.merge(o.m_courses);
    m_courses_moments.merge(o.m_courses_moments);
    m_graduated += o.m_graduated;
    m_hard_drops += o.m_hard_drops;
    m_first_year += o.m_first_year;
    m_zero_course += o.m_zero_course;
    m_stress.merge(o.m_stress);
    m_belonging.merge(o.m_belonging);
    for (const auto& [rep, m] : o.m_reps) {
        m_reps[rep].merge(m);
    }
    for (std::size_t t = 0; t < m_survivors.size(); ++t) {
        m_survivors[t].merge(o.m_survivors[t]);
        m_frozen[t].merge(o.m_frozen[t]);
    }
    for (const auto& [g, s] : o.m_groups) {
        m_groups[g].merge(s);
    }
}

namespace
{

double ratio(long long num, long long den)
{
    return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
}

} // namespace

double ScenarioStats::dropout_rate() const
{
    return 1.0 - graduation_rate();
}

double ScenarioStats::hard_dropout_rate() const
{
    return ratio(m_hard_drops, n_agents());
}

double ScenarioStats::graduation_rate() const
{
    return ratio(m_graduated, n_agents());
}

double ScenarioStats::mean_courses() const
{
    return m_courses_moments.mean();
}

double ScenarioStats::std_courses() const
{
    return m_courses_moments.sd();
}

int ScenarioStats::median_courses() const
{
    return m_courses.lower_median();
}

double ScenarioStats::mean_courses_by_rep() const
{
    Moments means;
    for (const auto& [rep, m] : m_reps) {
        means.add(m.mean());
    }
    return means.mean();
}

double ScenarioStats::mean_stress() const
{
    return m_stress.mean();
}

double ScenarioStats::mean_belonging() const
{
    return m_belonging.mean();
}

double ScenarioStats::first_year_dropout_share() const
{
    return ratio(m_first_year, m_hard_drops);
}

double ScenarioStats::zero_course_dropout_share() const
{
    return ratio(m_zero_course, m_hard_drops);
}

const SemesterSummary& ScenarioStats::survivors(int t) const
{
    if (t < 1 || t > m_horizon) {
        throw InputError("semester " + std::to_string(t) + " outside 1.." + std::to_string(m_horizon));
    }
    return m_survivors[static_cast<std::size_t>(t - 1)];
}

const SemesterSummary& ScenarioStats::frozen(int t) const
{
    if (t < 1 || t > m_horizon) {
        throw InputError("semester " + std::to_string(t) + " outside 1.." + std::to_string(m_horizon));
    }
    return m_frozen[static_cast<std::size_t>(t - 1)];
}

FactorialEffects factorial_main_effects(const std::vector<ScenarioOutcome>& rows)
{
    std::array<const ScenarioOutcome*, 8> cells{};
    for (const auto& r : rows) {
        auto idx = (r.scenario.a ? 4 : 0) + (r.scenario.b ? 2 : 0) + (r.scenario.c ? 1 : 0);
        if (cells[static_cast<std::size_t>(idx)]) {
            throw InputError("scenario " + r.scenario.id() + " appears twice");
        }
        cells[static_cast<std::size_t>(idx)] = &r;
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!cells[i]) {
            throw InputError("incomplete factorial design: missing " + enumerate_factorial()[i].id());
        }
    }
    FactorialEffects fx;
    for (int factor = 0; factor < 3; ++factor) {
        const int bit = 4 >> factor;
        double d_on = 0.0, d_off = 0.0, c_on = 0.0, c_off = 0.0;
        for (int i = 0; i < 8; ++i) {
            const auto* r = cells[static_cast<std::size_t>(i)];
            if (i & bit) {
                d_on += r->dropout_rate;
                c_on += r->mean_courses;
            }
            else {
                d_off += r->dropout_rate;
                c_off += r->mean_courses;
            }
        }
        fx.dropout[static_cast<std::size_t>(factor)] = (d_on - d_off) / 4.0;
        fx.courses[static_cast<std::size_t>(factor)] = (c_on - c_off) / 4.0;
    }
    return fx;
}

std::vector<ScenarioOutcome> parse_table2(std::string_view csv)
{
    auto t        = parse_table(csv, "table2.csv");
    auto id_col   = t.column("scenario_id");
    auto drop_col = t.column("dropout_rate");
    auto mean_col = t.column("mean_courses");
    std::vector<ScenarioOutcome> out;
    for (const auto& row : t.rows) {
        ScenarioOutcome o;
        o.scenario     = parse_scenario_id(row[id_col]);
        o.dropout_rate = parse_double(row[drop_col], "dropout_rate");
        o.mean_courses = parse_double(row[mean_col], "mean_courses");
        out.push_back(o);
    }
    return out;
}

std::vector<ScenarioStats> in_factorial_order(std::vector<ScenarioStats> stats)
{
    auto rank = [](const ScenarioStats& s) {
        auto p = parse_scenario_id(s.scenario_id());
        return (p.a ? 4 : 0) + (p.b ? 2 : 0) + (p.c ? 1 : 0);
    };
    std::stable_sort(stats.begin(), stats.end(),
                     [&](const ScenarioStats& x, const ScenarioStats& y) { return rank(x) < rank(y); });
    for (std::size_t i = 1; i < stats.size(); ++i) {
        if (stats[i].scenario_id() == stats[i - 1].scenario_id()) {
            throw InputError("scenario " + stats[i].scenario_id() + " appears twice");
        }
    }
    return stats;
}

namespace
{

std::string num(double v)
{
    return std::isfinite(v) ? format_double(v) : "NA";
}

std::string join(const std::vector<std::string>& fields)
{
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        out += i ? "," : "";
        out += fields[i];
    }
    out += '\n';
    return out;
}

// Indicator positions in StructuralSnapshot::values()
constexpr std::size_t k_backbone = 0, k_blocked = 1, k_distance = 2, k_bottleneck = 3, k_prereq = 4, k_in = 5,
                      k_out = 6;

std::vector<std::string> table3_header()
{
    return {"scenario_id",
            "backbone_completion_mean",
            "backbone_completion_sd",
            "blocked_credits_mean",
            "blocked_credits_median",
            "blocked_credits_sd",
            "distance_to_graduation_mean",
            "distance_to_graduation_sd",
            "bottleneck_approval_ratio_mean",
            "prerequisites_met_ratio_mean",
            "mean_in_degree_approved_mean",
            "mean_out_degree_approved_mean"};
}

std::vector<std::string> table3_fields(const SemesterSummary& s)
{
    const auto& m = s.indicators;
    const bool any = s.count() > 0;
    auto sd        = [&](std::size_t k) { return any ? num(m[k].sd()) : "NA"; };
    return {num(m[k_backbone].mean()),   sd(k_backbone),
            num(m[k_blocked].mean()),    any ? std::to_string(s.blocked.lower_median()) : "NA",
            sd(k_blocked),               num(m[k_distance].mean()),
            sd(k_distance),              num(m[k_bottleneck].mean()),
            num(m[k_prereq].mean()),     num(m[k_in].mean()),
            num(m[k_out].mean())};
}

} // namespace

std::string format_table2(const std::vector<ScenarioStats>& stats)
{
    std::string out = join({"scenario_id", "dropout_rate", "mean_courses", "std_courses", "median_courses"});
    for (const auto& s : stats) {
        out += join({s.scenario_id(), num(s.dropout_rate()), num(s.mean_courses()), num(s.std_courses()),
                     std::to_string(s.median_courses())});
    }
    return out;
}

std::string format_table3(const std::vector<ScenarioStats>& stats, int t)
{
    std::string out = join(table3_header());
    for (const auto& s : stats) {
        auto fields = table3_fields(s.survivors(t));
        fields.insert(fields.begin(), s.scenario_id());
        out += join(fields);
    }
    return out;
}

std::string format_table3_extended(const std::vector<ScenarioStats>& stats, int t)
{
    auto header = table3_header();
    header.push_back("n_observed");
    for (std::size_t i = 1; i < table3_header().size(); ++i) {
        header.push_back("frozen_" + table3_header()[i]);
    }
    header.push_back("frozen_n_observed");
    header.insert(header.begin() + 1, "semester");
    std::string out = join(header);
    for (const auto& s : stats) {
        std::vector<std::string> fields{s.scenario_id(), std::to_string(t)};
        for (auto& f : table3_fields(s.survivors(t))) {
            fields.push_back(std::move(f));
        }
        fields.push_back(std::to_string(s.survivors(t).count()));
        for (auto& f : table3_fields(s.frozen(t))) {
            fields.push_back(std::move(f));
        }
        fields.push_back(std::to_string(s.frozen(t).count()));
        out += join(fields);
    }
    return out;
}

std::string format_scenario_summary(const std::vector<ScenarioStats>& stats)
{
    std::string out = join({"scenario_id", "n_agents", "dropout_rate", "hard_dropout_rate", "graduation_rate",
                            "mean_stress", "mean_belonging", "mean_courses", "mean_courses_by_rep",
                            "first_year_dropout_share", "zero_course_dropout_share"});
    for (const auto& s : stats) {
        out += join({s.scenario_id(), std::to_string(s.n_agents()), num(s.dropout_rate()),
                     num(s.hard_dropout_rate()), num(s.graduation_rate()), num(s.mean_stress()),
                     num(s.mean_belonging()), num(s.mean_courses()), num(s.mean_courses_by_rep()),
                     num(s.first_year_dropout_share()), num(s.zero_course_dropout_share())});
    }
    return out;
}

std::string format_factorial_effects(const FactorialEffects& fx)
{
    std::string out = "key,value\n";
    const char* factors[] = {"A", "B", "C"};
    for (std::size_t i = 0; i < 3; ++i) {
        out += std::string(factors[i]) + ".dropout_rate," + format_double(fx.dropout[i]) + "\n";
        out += std::string(factors[i]) + ".mean_courses," + format_double(fx.courses[i]) + "\n";
    }
    return out;
}

std::string format_archetype_breakdown(const std::vector<ScenarioStats>& stats)
{
    std::string out = join({"scenario_id", "group", "n_agents", "dropout_rate", "hard_dropout_rate", "mean_courses"});
    for (const auto& s : stats) {
        for (auto g : {Group::vulnerable, Group::stable}) {
            auto it = s.groups().find(g);
            if (it == s.groups().end() || it->second.n_agents == 0) {
                continue;
            }
            const auto& gs = it->second;
            out += join({s.scenario_id(), std::string(to_string(g)), std::to_string(gs.n_agents),
                         num(1.0 - ratio(gs.n_graduated, gs.n_agents)), num(ratio(gs.n_hard_drops, gs.n_agents)),
                         num(ratio(gs.courses_sum, gs.n_agents))});
        }
    }
    return out;
}

std::string format_figure1_series(const std::vector<ScenarioStats>& stats)
{
    std::string out = join({"scenario_id", "semester", "backbone_mean"});
    for (const auto& s : stats) {
        for (int t = 1; t <= s.horizon(); ++t) {
            out += join({s.scenario_id(), std::to_string(t), num(s.frozen(t).indicators[k_backbone].mean())});
        }
    }
    return out;
}

std::vector<std::string> write_aggregates(const std::vector<ScenarioStats>& stats, const std::filesystem::path& out_dir,
                                          int snapshot_semester)
{
    std::vector<std::pair<std::string, std::string>> files = {
        {"table2.csv", format_table2(stats)},
        {"table3_semester" + std::to_string(snapshot_semester) + ".csv", format_table3(stats, snapshot_semester)},
        {"table3_semester" + std::to_string(snapshot_semester) + "_extended.csv",
         format_table3_extended(stats, snapshot_semester)},
        {"scenario_summary.csv", format_scenario_summary(stats)},
        {"archetype_breakdown.csv", format_archetype_breakdown(stats)},
        {"figure1_series.csv", format_figure1_series(stats)},
    };
    if (stats.size() == 8) {
        std::vector<ScenarioOutcome> rows;
        for (const auto& s : stats) {
            rows.push_back({parse_scenario_id(s.scenario_id()), s.dropout_rate(), s.mean_courses()});
        }
        files.emplace_back("factorial_effects.csv", format_factorial_effects(factorial_main_effects(rows)));
    }
    std::vector<std::string> names;
    for (const auto& [name, text] : files) {
        write_file(out_dir / name, text);
        names.push_back(name);
    }
    return names;
}

std::vector<ScenarioStats> aggregate_directory(const std::filesystem::path& records_dir, int horizon)
{
    if (!std::filesystem::is_directory(records_dir)) {
        throw IoError("records directory " + records_dir.string() + " does not exist");
    }
    static const std::regex pattern(R"(^(A[01]B[01]C[01])_([0-9]{3,})\.csv(\.gz)?$)");
    // (scenario rank, replication) -> path
    std::map<std::pair<int, int>, std::filesystem::path> units;
    std::map<int, std::string> names;
    for (const auto& entry : std::filesystem::directory_iterator(records_dir)) {
        auto name = entry.path().filename().string();
        std::smatch m;
        if (!entry.is_regular_file() || !std::regex_match(name, m, pattern)) {
            continue;
        }
        auto p     = parse_scenario_id(m[1].str());
        int rank   = (p.a ? 4 : 0) + (p.b ? 2 : 0) + (p.c ? 1 : 0);
        int rep    = static_cast<int>(parse_int(m[2].str(), "replication"));
        names[rank] = m[1].str();
        if (!units.emplace(std::make_pair(rank, rep), entry.path()).second) {
            throw InputError("duplicate record files for " + m[1].str() + " replication " + std::to_string(rep));
        }
    }
    if (units.empty()) {
        throw InputError("no record files in " + records_dir.string());
    }
    std::vector<ScenarioStats> out;
    for (const auto& [key, path] : units) {
        if (out.empty() || out.back().scenario_id() != names[key.first]) {
            out.emplace_back(names[key.first], horizon);
        }
        auto records = read_record_file(path);
        for (const auto& r : records) {
            if (r.scenario_id != names[key.first] || r.replication != key.second) {
                throw InputError(path.string() + ": record identifiers do not match the file name");
            }
        }
        ScenarioStats unit(names[key.first], horizon);
        unit.add_unit(records);
        out.back().merge(unit);
    }
    return out;
}

} // namespace capire
