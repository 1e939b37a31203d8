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
#include "capire/experiment.h"

#include "capire/error.h"
#include "capire/table_io.h"

#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

namespace capire
{

ModelInputs load_inputs(const ExperimentConfig& config)
{
    const auto& in = config.inputs;
    ModelInputs m;
    auto base =
        std::make_shared<CurriculumGraph>(load_curriculum_files(in.courses, in.edges, config.plan_length, config.bottleneck));
    auto spec    = load_redesign_files(in.redesign, in.reassign);
    m.a1_graph   = std::make_shared<CurriculumGraph>(apply_redesign(*base, spec));
    m.base_graph = base;
    m.archetypes = load_archetypes(in.archetypes);
    m.engine     = load_engine_params(in.engine_params, in.course_pass, *base);
    m.engine.horizon = config.horizon;
    m.policy     = load_policy_params(in.policy_params);
    return m;
}

void simulate_cohort(const ModelInputs& inputs, const PolicyScenario& scenario, std::uint64_t seed, int replication,
                     int n_students, const AgentVisitor& visit)
{
    const auto fx = effects(scenario, inputs.policy, inputs.base_graph, inputs.a1_graph);
    const Engine engine(fx, inputs.engine);
    auto cohort = sample_cohort(inputs.archetypes, n_students, seed, static_cast<std::uint64_t>(replication));
    for (auto& agent : cohort) {
        const CounterRng rng(seed, static_cast<std::uint64_t>(replication), static_cast<std::uint64_t>(agent.agent_id));
        auto records = engine.run_trajectory(agent, rng);
        visit(agent, records);
    }
}

ScenarioStats simulate_unit(const ModelInputs& inputs, const PolicyScenario& scenario, std::uint64_t seed,
                            int replication, int n_students, std::string* record_body)
{
    const auto id = scenario.id();
    ScenarioStats stats(id, inputs.engine.horizon);
    std::vector<LongRecord> rows;
    simulate_cohort(inputs, scenario, seed, replication, n_students,
                    [&](const AgentState&, const std::vector<SemesterRecord>& records) {
                        rows.clear();
                        for (const auto& r : records) {
                            rows.push_back(to_long_record(r, id, replication));
                            if (record_body) {
                                append_record_line(*record_body, rows.back());
                            }
                        }
                        stats.add_agent(rows.data(), rows.size());
                    });
    return stats;
}

void parallel_for(int n, int workers, const std::function<void(int)>& task)
{
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) {
            task(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (!failed.load()) {
            int i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                task(i);
            }
            catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed = true;
            }
        }
    };
    std::vector<std::thread> threads;
    for (int w = 0; w < std::min(workers, n); ++w) {
        threads.emplace_back(worker);
    }
    for (auto& t : threads) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

std::string config_hash(const ExperimentConfig& config, const ModelInputs& inputs)
{
    std::string text;
    for (const auto& [key, value] : resolved_settings(config)) {
        // execution and location settings do not affect results
        if (key == "workers" || key == "out" || key.rfind("calibration_", 0) == 0 || key == "targets" ||
            key == "bounds") {
            continue;
        }
        if (key == "courses" || key == "edges" || key == "redesign" || key == "reassign" || key == "archetypes" ||
            key == "engine_params" || key == "course_pass" || key == "policy_params") {
            continue; // replaced by the loaded content below
        }
        text += key + "=" + value + "\n";
    }
    auto graph_text = [](const CurriculumGraph& g) {
        std::string s;
        for (const auto& c : g.courses()) {
            s += c.id + "," + std::to_string(c.semester) + "," + std::to_string(c.credits) + "," +
                 (c.backbone ? "1" : "0") + "\n";
        }
        for (const auto& e : g.edges()) {
            s += e.prereq + ">" + e.course + "\n";
        }
        return s;
    };
    text += graph_text(*inputs.base_graph);
    text += graph_text(*inputs.a1_graph);
    text += format_archetypes(inputs.archetypes);
    text += format_engine_params(inputs.engine);
    for (std::size_t c = 0; c < inputs.engine.base_pass_prob.size(); ++c) {
        text += format_double(inputs.engine.base_pass_prob[c]) + "," + format_double(inputs.engine.friction[c]) + "\n";
    }
    for (const auto& [key, value] : to_key_values(inputs.policy)) {
        text += key + "=" + value + "\n";
    }
    return sha256_hex(text);
}

RunSummary run_experiment(const ExperimentConfig& config, const ModelInputs& inputs)
{
    validate(config);
    const auto records_dir = config.out_dir / "records";
    const auto tables_dir  = config.out_dir / "tables";
    std::filesystem::create_directories(records_dir);
    // stale units from an earlier, larger run would otherwise leak into `aggregate`
    for (const auto& entry : std::filesystem::directory_iterator(records_dir)) {
        if (entry.is_regular_file() && is_record_file_name(entry.path().filename().string())) {
            std::filesystem::remove(entry.path());
        }
    }

    struct Unit {
        PolicyScenario scenario;
        int replication = 0;
        std::string file;
        std::optional<ScenarioStats> stats;
        std::string digest;
        long long n_records = 0;
    };
    std::vector<Unit> units;
    for (const auto& s : config.scenarios) {
        for (int rep = 0; rep < config.replications; ++rep) {
            Unit u;
            u.scenario    = s;
            u.replication = rep;
            u.file        = record_file_stem(s.id(), rep) + (config.compress ? ".csv.gz" : ".csv");
            units.push_back(std::move(u));
        }
    }

    parallel_for(static_cast<int>(units.size()), resolved_workers(config), [&](int i) {
        auto& u = units[static_cast<std::size_t>(i)];
        std::string body;
        u.stats = simulate_unit(inputs, u.scenario, config.seed, u.replication, config.n_students, &body);
        for (char ch : body) {
            u.n_records += ch == '\n' ? 1 : 0;
        }
        const auto path = records_dir / u.file;
        write_record_file(path, body);
        u.digest = sha256_hex(read_file(path));
    });

    RunSummary summary;
    for (auto& u : units) {
        if (summary.stats.empty() || summary.stats.back().scenario_id() != u.scenario.id()) {
            summary.stats.emplace_back(u.scenario.id(), inputs.engine.horizon);
        }
        summary.stats.back().merge(*u.stats);
        summary.record_files.push_back(u.file);
        summary.n_records += u.n_records;
    }
    auto tables = write_aggregates(summary.stats, tables_dir, config.snapshot_semester);

    std::string manifest = "# capire run manifest\n";
    manifest += "config_hash = " + config_hash(config, inputs) + "\n";
    for (const auto& [key, value] : resolved_settings(config)) {
        manifest += "setting." + key + " = " + value + "\n";
    }
    const auto& in = config.inputs;
    for (const auto& [name, path] :
         std::vector<std::pair<std::string, std::filesystem::path>>{{"courses", in.courses},
                                                                    {"edges", in.edges},
                                                                    {"redesign", in.redesign},
                                                                    {"reassign", in.reassign},
                                                                    {"archetypes", in.archetypes},
                                                                    {"engine_params", in.engine_params},
                                                                    {"course_pass", in.course_pass},
                                                                    {"policy_params", in.policy_params}}) {
        if (!path.empty()) {
            manifest += "input." + name + " = " + sha256_hex(read_file(path)) + "\n";
        }
    }
    manifest += "scenario_count = " + std::to_string(config.scenarios.size()) + "\n";
    manifest += "replication_count = " + std::to_string(config.replications) + "\n";
    manifest += "total_records = " + std::to_string(summary.n_records) + "\n";
    for (const auto& u : units) {
        manifest += "record." + u.file + " = " + u.digest + " " + std::to_string(u.n_records) + "\n";
    }
    for (const auto& name : tables) {
        manifest += "table." + name + " = " + sha256_hex(read_file(tables_dir / name)) + "\n";
    }
    write_file(config.out_dir / "manifest.txt", manifest);
    return summary;
}

} // namespace capire
