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
#include "capire/calibration.h"

#include "capire/error.h"
#include "capire/table_io.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

namespace capire
{

std::vector<Target> parse_targets(std::string_view csv)
{
    auto t = parse_table(csv, "targets.csv");
    require_header(t, {"quantity", "target", "tolerance", "weight"});
    std::vector<Target> out;
    for (const auto& row : t.rows) {
        Target x{row[0], parse_double(row[1], "target of " + row[0]), parse_double(row[2], "tolerance of " + row[0]),
                 parse_double(row[3], "weight of " + row[0])};
        if (!(x.tolerance > 0.0)) {
            throw InputError("targets.csv: tolerance of " + x.quantity + " must be > 0");
        }
        if (!(x.weight >= 0.0)) {
            throw InputError("targets.csv: weight of " + x.quantity + " must be >= 0");
        }
        for (const auto& prev : out) {
            if (prev.quantity == x.quantity) {
                throw InputError("targets.csv: duplicate quantity " + x.quantity);
            }
        }
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<Target> load_targets(const std::filesystem::path& path)
{
    return parse_targets(read_file(path));
}

namespace
{

enum class Side
{
    both,
    floor,
    ceiling,
};

Side side_of(const Target& t)
{
    if (t.quantity.ends_with("_min")) {
        return Side::floor;
    }
    if (t.quantity.ends_with("_max")) {
        return Side::ceiling;
    }
    return Side::both;
}

} // namespace

std::string observed_name(const Target& t)
{
    return side_of(t) == Side::both ? t.quantity : t.quantity.substr(0, t.quantity.size() - 4);
}

double score(const std::vector<Target>& targets, const std::map<std::string, double>& observed)
{
    // summed in quantity order so the loss does not depend on how targets are listed
    std::vector<const Target*> sorted;
    for (const auto& t : targets) {
        sorted.push_back(&t);
    }
    std::sort(sorted.begin(), sorted.end(), [](const Target* a, const Target* b) { return a->quantity < b->quantity; });
    double loss = 0.0;
    for (const auto* t : sorted) {
        auto it = observed.find(observed_name(*t));
        if (it == observed.end()) {
            throw InputError("no observed value for target quantity '" + t->quantity + "'");
        }
        double gap = it->second - t->target;
        switch (side_of(*t)) {
        case Side::floor:
            gap = std::min(gap, 0.0);
            break;
        case Side::ceiling:
            gap = std::max(gap, 0.0);
            break;
        default:
            break;
        }
        const double z = gap / t->tolerance;
        loss += t->weight * z * z;
    }
    return loss;
}

std::vector<Bound> parse_bounds(std::string_view csv)
{
    auto t = parse_table(csv, "bounds.csv");
    require_header(t, {"parameter", "low", "high"});
    std::vector<Bound> out;
    for (const auto& row : t.rows) {
        Bound b{row[0], parse_double(row[1], "low of " + row[0]), parse_double(row[2], "high of " + row[0])};
        if (!(b.low <= b.high)) {
            throw InputError("bounds.csv: low > high for " + b.parameter);
        }
        for (const auto& prev : out) {
            if (prev.parameter == b.parameter) {
                throw InputError("bounds.csv: duplicate parameter " + b.parameter);
            }
        }
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<Bound> load_bounds(const std::filesystem::path& path)
{
    return parse_bounds(read_file(path));
}

namespace
{

Archetype& find_archetype(ArchetypeTable& table, std::string_view id)
{
    for (auto& a : table) {
        if (a.id == id) {
            return a;
        }
    }
    throw InputError("unknown archetype '" + std::string(id) + "'");
}

double* archetype_field(Archetype& a, std::string_view field)
{
    if (field == "pass_logit_shift") {
        return &a.pass_logit_shift;
    }
    if (field == "hazard_sensitivity") {
        return &a.hazard_sensitivity;
    }
    if (field == "stress0_mean") {
        return &a.stress0_mean;
    }
    if (field == "stress0_sd") {
        return &a.stress0_sd;
    }
    if (field == "belonging0_mean") {
        return &a.belonging0_mean;
    }
    if (field == "belonging0_sd") {
        return &a.belonging0_sd;
    }
    return nullptr;
}

// Splits "archetype.<id>.<field>"; the id may not contain dots.
std::pair<std::string, std::string> archetype_key(std::string_view name)
{
    auto rest = name.substr(10);
    auto dot  = rest.find('.');
    if (dot == std::string_view::npos) {
        throw InputError("archetype parameter must be 'archetype.<id>.<field>'");
    }
    return {std::string(rest.substr(0, dot)), std::string(rest.substr(dot + 1))};
}

} // namespace

double get_parameter(const ModelInputs& inputs, std::string_view name)
{
    if (name.starts_with("policy.")) {
        auto kv = to_key_values(inputs.policy);
        auto it = kv.find(std::string(name.substr(7)));
        if (it == kv.end() || it->first == "b1_target") {
            throw InputError("unknown policy parameter '" + std::string(name) + "'");
        }
        return parse_double(it->second, name);
    }
    if (name.starts_with("archetype.")) {
        auto [id, field] = archetype_key(name);
        auto table       = inputs.archetypes;
        auto& a          = find_archetype(table, id);
        if (field == "max_load") {
            return a.max_load;
        }
        if (auto* p = archetype_field(a, field)) {
            return *p;
        }
        throw InputError("unknown archetype field '" + field + "'");
    }
    return get_engine_param(inputs.engine, name);
}

void set_parameter(ModelInputs& inputs, std::string_view name, double value)
{
    if (name.starts_with("policy.")) {
        auto kv = to_key_values(inputs.policy);
        auto it = kv.find(std::string(name.substr(7)));
        if (it == kv.end() || it->first == "b1_target") {
            throw InputError("unknown policy parameter '" + std::string(name) + "'");
        }
        it->second    = format_double(value);
        inputs.policy = parse_policy_params(kv);
        return;
    }
    if (name.starts_with("archetype.")) {
        auto [id, field] = archetype_key(name);
        auto& a          = find_archetype(inputs.archetypes, id);
        if (field == "max_load") {
            a.max_load = static_cast<int>(std::lround(value));
        }
        else if (auto* p = archetype_field(a, field)) {
            *p = value;
        }
        else {
            throw InputError("unknown archetype field '" + field + "'");
        }
        validate_archetypes(inputs.archetypes);
        return;
    }
    set_engine_param(inputs.engine, name, value);
    validate(inputs.engine, *inputs.base_graph);
}

namespace
{

std::vector<double> average_ranks(const std::vector<double>& v)
{
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) {
            ++j;
        }
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = r;
        }
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size()) {
        throw InputError("spearman: samples differ in length");
    }
    if (x.size() < 2) {
        return 0.0;
    }
    auto rx = average_ranks(x);
    auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

std::vector<PolicyScenario> scenarios_for(const std::vector<Target>& targets)
{
    std::vector<PolicyScenario> needed{PolicyScenario{}};
    for (const auto& t : targets) {
        auto name = observed_name(t);
        auto dot  = name.find('.');
        if (dot == std::string::npos) {
            continue;
        }
        auto s = parse_scenario_id(name.substr(0, dot));
        if (std::find(needed.begin(), needed.end(), s) == needed.end()) {
            needed.push_back(s);
        }
    }
    std::vector<PolicyScenario> ordered;
    for (const auto& s : enumerate_factorial()) {
        if (std::find(needed.begin(), needed.end(), s) != needed.end()) {
            ordered.push_back(s);
        }
    }
    return ordered;
}

std::map<std::string, double> evaluate(const ModelInputs& inputs, const std::vector<PolicyScenario>& scenarios,
                                       std::uint64_t seed, int n_students, int replications, int workers)
{
    constexpr int snapshot_t = 8;
    constexpr int early_t    = 2;
    struct Unit {
        std::optional<ScenarioStats> stats;
        std::vector<double> early_fails;
        std::vector<double> blocked;
    };
    std::map<std::string, double> out;
    for (const auto& scenario : scenarios) {
        const bool baseline = scenario == PolicyScenario{};
        std::vector<Unit> units(static_cast<std::size_t>(replications));
        parallel_for(replications, workers, [&](int rep) {
            auto& u        = units[static_cast<std::size_t>(rep)];
            const auto id  = scenario.id();
            const auto& g  = scenario.a ? *inputs.a1_graph : *inputs.base_graph;
            u.stats.emplace(id, inputs.engine.horizon);
            std::vector<LongRecord> rows;
            simulate_cohort(inputs, scenario, seed, rep, n_students,
                            [&](const AgentState&, const std::vector<SemesterRecord>& records) {
                                rows.clear();
                                for (const auto& r : records) {
                                    rows.push_back(to_long_record(r, id, rep));
                                }
                                u.stats->add_agent(rows.data(), rows.size());
                                if (baseline && static_cast<int>(records.size()) >= snapshot_t) {
                                    u.early_fails.push_back((records[early_t - 1].failed & g.backbone()).size());
                                    u.blocked.push_back(records[snapshot_t - 1].snapshot.blocked_credits);
                                }
                            });
        });
        ScenarioStats total(scenario.id(), inputs.engine.horizon);
        std::vector<double> early, blocked;
        for (auto& u : units) {
            total.merge(*u.stats);
            early.insert(early.end(), u.early_fails.begin(), u.early_fails.end());
            blocked.insert(blocked.end(), u.blocked.begin(), u.blocked.end());
        }
        const auto& s8   = total.survivors(std::min(snapshot_t, total.horizon()));
        const bool any8  = s8.count() > 0;
        const double bb8 = any8 ? s8.indicators[0].mean() : 0.0;
        const double bl8 = any8 ? s8.blocked.lower_median() : 0.0;
        const double di8 = any8 ? s8.indicators[2].mean() : 1.0;
        const auto p     = scenario.id() + ".";
        out[p + "dropout_rate"]      = total.dropout_rate();
        out[p + "mean_courses"]      = total.mean_courses();
        out[p + "median_courses"]    = total.median_courses();
        out[p + "mean_stress"]       = total.mean_stress();
        out[p + "mean_belonging"]    = total.mean_belonging();
        out[p + "backbone_s8"]       = bb8;
        out[p + "blocked_median_s8"] = bl8;
        out[p + "distance_s8"]       = di8;
        if (baseline) {
            out["baseline_noncompletion"]      = total.dropout_rate();
            out["baseline_mean_courses"]       = total.mean_courses();
            out["baseline_median_courses"]     = total.median_courses();
            out["hard_dropout_rate"]           = total.hard_dropout_rate();
            out["first_year_dropout_share"]    = total.first_year_dropout_share();
            out["zero_course_leaver_share"]    = total.zero_course_dropout_share();
            out["mean_stress"]                 = total.mean_stress();
            out["mean_belonging"]              = total.mean_belonging();
            out["semester8_backbone_mean"]     = bb8;
            out["semester8_blocked_median"]    = bl8;
            out["semester8_distance_mean"]     = di8;
            out["early_failure_blockage_rho"]  = spearman(early, blocked);
            out["semester8_survivors"]         = static_cast<double>(s8.count());
        }
    }
    return out;
}

namespace
{

std::string describe(const std::vector<Bound>& bounds, const std::vector<double>& x)
{
    std::string s;
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        s += (i ? ", " : "") + bounds[i].parameter + "=" + format_double(x[i]);
    }
    return s;
}

} // namespace

CalibrationResult calibrate(const ModelInputs& start, const std::vector<Bound>& bounds,
                            const std::vector<Target>& targets, const CalibrationSettings& settings, int workers)
{
    if (settings.budget < 1) {
        throw InputError("calibration budget must be >= 1");
    }
    const auto scenarios = scenarios_for(targets);
    const std::size_t d  = bounds.size();
    CalibrationResult result;
    result.best_inputs = start;
    result.best_loss   = std::numeric_limits<double>::infinity();

    auto build = [&](const std::vector<double>& x) {
        ModelInputs m = start;
        for (std::size_t i = 0; i < d; ++i) {
            set_parameter(m, bounds[i].parameter, x[i]);
        }
        return m;
    };
    auto run = [&](const std::vector<double>& x, std::uint64_t seed) {
        try {
            auto m = build(x);
            return std::make_pair(score(targets, evaluate(m, scenarios, seed, settings.n_students,
                                                          settings.replications, workers)),
                                  std::move(m));
        }
        catch (const Error& e) {
            throw Error(e.kind(), std::string(e.what()) + " at point (" + describe(bounds, x) + ")");
        }
    };
    int used = 0;
    auto consider = [&](const std::vector<double>& x, const std::string& phase) {
        auto [loss, m] = run(x, settings.seed);
        ++used;
        if (loss < result.best_loss) {
            result.best_loss   = loss;
            result.best_point  = x;
            result.best_inputs = std::move(m);
        }
        result.trace.push_back({used, phase, x, loss, result.best_loss});
        return loss;
    };

    std::vector<double> x0(d);
    for (std::size_t i = 0; i < d; ++i) {
        x0[i] = std::clamp(get_parameter(start, bounds[i].parameter), bounds[i].low, bounds[i].high);
    }
    consider(x0, "start");

    // noise floor: the start point under fresh seeds; informative only
    for (int k = 1; k <= settings.noise_repeats && used < settings.budget; ++k) {
        auto loss = run(x0, settings.seed + static_cast<std::uint64_t>(k)).first;
        ++used;
        result.trace.push_back({used, "noise", x0, loss, result.best_loss});
    }

    const CounterRng rng(settings.seed, 0, 0);
    const int remaining = settings.budget - used;
    const int n_lhs     = d == 0 ? 0 : std::min(remaining, std::max(static_cast<int>(d) + 1, remaining / 4));
    if (n_lhs > 0) {
        std::vector<std::vector<double>> samples(static_cast<std::size_t>(n_lhs), std::vector<double>(d));
        std::uint64_t draw = 0;
        for (std::size_t i = 0; i < d; ++i) {
            std::vector<int> strata(static_cast<std::size_t>(n_lhs));
            std::iota(strata.begin(), strata.end(), 0);
            for (int k = n_lhs - 1; k > 0; --k) {
                auto j = static_cast<int>(rng.uniform(0, DrawPhase::search, draw++) * (k + 1));
                std::swap(strata[static_cast<std::size_t>(k)], strata[static_cast<std::size_t>(std::min(j, k))]);
            }
            for (int k = 0; k < n_lhs; ++k) {
                double u = (strata[static_cast<std::size_t>(k)] + rng.uniform(0, DrawPhase::search, draw++)) / n_lhs;
                samples[static_cast<std::size_t>(k)][i] = bounds[i].low + u * (bounds[i].high - bounds[i].low);
            }
        }
        for (const auto& x : samples) {
            consider(x, "lhs");
        }
    }

    std::vector<double> step(d);
    for (std::size_t i = 0; i < d; ++i) {
        step[i] = (bounds[i].high - bounds[i].low) / 4.0;
    }
    while (used < settings.budget && d > 0) {
        bool improved = false;
        bool moved    = false;
        for (std::size_t i = 0; i < d && used < settings.budget; ++i) {
            for (double dir : {1.0, -1.0}) {
                if (used >= settings.budget) {
                    break;
                }
                auto x = result.best_point;
                x[i]   = std::clamp(x[i] + dir * step[i], bounds[i].low, bounds[i].high);
                if (x[i] == result.best_point[i]) {
                    continue;
                }
                moved            = true;
                const double old = result.best_loss;
                consider(x, "descent");
                if (result.best_loss < old) {
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) {
            double largest = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                step[i] /= 2.0;
                double span = bounds[i].high - bounds[i].low;
                largest     = std::max(largest, span > 0.0 ? step[i] / span : 0.0);
            }
            if (!moved && largest < 1e-9) {
                break;
            }
            if (largest < 1e-9) {
                break;
            }
        }
    }
    return result;
}

std::string format_trace(const std::vector<Bound>& bounds, const std::vector<TraceRow>& trace)
{
    std::string out = "evaluation,phase";
    for (const auto& b : bounds) {
        out += "," + b.parameter;
    }
    out += ",loss,best_so_far\n";
    for (const auto& row : trace) {
        out += std::to_string(row.evaluation) + "," + row.phase;
        for (double v : row.point) {
            out += "," + format_double(v);
        }
        out += "," + format_double(row.loss) + "," + format_double(row.best_so_far) + "\n";
    }
    return out;
}

void write_calibrated_inputs(const ExperimentConfig& config, const CalibrationResult& result,
                             const std::vector<Bound>& bounds, const std::filesystem::path& out_dir)
{
    const auto& m = result.best_inputs;
    std::string engine = "key,value\n";
    for (const auto& key : engine_param_keys()) {
        engine += key + "," + format_double(get_engine_param(m.engine, key)) + "\n";
    }
    write_file(out_dir / "engine_params.csv", engine);
    write_file(out_dir / "archetypes.csv", format_archetypes(m.archetypes));
    std::string policy = "key,value\n";
    for (const auto& [key, value] : to_key_values(m.policy)) {
        policy += key + "," + value + "\n";
    }
    write_file(out_dir / "policy_params.csv", policy);
    std::string best = "parameter,value\n";
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        best += bounds[i].parameter + "," + format_double(result.best_point[i]) + "\n";
    }
    write_file(out_dir / "calibrated_parameters.csv", best);

    auto abs = [](const std::filesystem::path& p) { return std::filesystem::absolute(p).lexically_normal().string(); };
    std::string cfg = "# written by `capire calibrate`\n";
    for (const auto& [key, value] : resolved_settings(config)) {
        if (key == "engine_params" || key == "archetypes" || key == "policy_params") {
            cfg += key + " = " + key + ".csv\n";
        }
        else if (key == "courses" || key == "edges" || key == "redesign" || key == "course_pass" ||
                 key == "targets" || key == "bounds" || key == "out") {
            cfg += key + " = " + abs(value) + "\n";
        }
        else if (key == "reassign") {
            cfg += key + " = " + (value.empty() ? std::string() : abs(value)) + "\n";
        }
        else if (key == "workers") {
            cfg += key + " = " + std::to_string(config.workers) + "\n";
        }
        else {
            cfg += key + " = " + value + "\n";
        }
    }
    write_file(out_dir / "calibrated.cfg", cfg);
}

} // namespace capire
