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
#include "capire/calibration.h"
#include "capire/config.h"
#include "capire/error.h"
#include "capire/experiment.h"
#include "capire/table_io.h"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

using namespace capire;

namespace
{

std::string join_ids(const std::vector<std::string>& ids)
{
    std::string s;
    for (const auto& id : ids) {
        s += (s.empty() ? "" : ",") + id;
    }
    return s;
}

void print_graph(const std::string& label, const CurriculumGraph& g)
{
    std::cout << label << "courses=" << g.size() << " edges=" << g.edge_count() << " acyclic=yes\n";
    std::cout << label << "bottlenecks=" << join_ids(course_ids(g, g.bottlenecks())) << "\n";
}

ExperimentConfig resolve_config(const std::string& path, const ConfigOverrides& overrides)
{
    auto config = load_config(path);
    apply_overrides(config, overrides);
    return config;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"capire: curriculum cohort simulation and policy experiments"};
    app.require_subcommand(1);

    std::string config_path;
    ConfigOverrides overrides;
    std::string scenarios;
    int replications = 0, n_students = 0, workers = -1;
    long long seed = -1;
    std::string out_dir, in_dir;
    int budget = 0;
    int horizon = 12, snapshot = 8;

    auto add_overrides = [&](CLI::App* cmd) {
        cmd->add_option("--scenarios", scenarios, "scenario ids (comma separated) or 'all'");
        cmd->add_option("--replications", replications, "replications per scenario")->check(CLI::PositiveNumber);
        cmd->add_option("--n-students", n_students, "agents per cohort")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed, "master seed")->check(CLI::NonNegativeNumber);
        cmd->add_option("--workers", workers, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
        cmd->add_option("--out", out_dir, "output directory");
    };

    auto* validate_cmd = app.add_subcommand("validate", "check inputs and print curriculum statistics");
    validate_cmd->add_option("--config", config_path, "config file")->required();

    auto* run_cmd = app.add_subcommand("run", "run the factorial experiment");
    run_cmd->add_option("--config", config_path, "config file")->required();
    add_overrides(run_cmd);

    auto* aggregate_cmd = app.add_subcommand("aggregate", "aggregate a records directory into tables");
    aggregate_cmd->add_option("--in", in_dir, "records directory")->required();
    aggregate_cmd->add_option("--out", out_dir, "output directory")->required();
    aggregate_cmd->add_option("--horizon", horizon, "simulated semesters")->check(CLI::PositiveNumber);
    aggregate_cmd->add_option("--snapshot-semester", snapshot, "semester of the structural snapshot")
        ->check(CLI::PositiveNumber);

    auto* calibrate_cmd = app.add_subcommand("calibrate", "fit parameters to the baseline targets");
    calibrate_cmd->add_option("--config", config_path, "config file")->required();
    calibrate_cmd->add_option("--budget", budget, "evaluation budget")->check(CLI::PositiveNumber);
    add_overrides(calibrate_cmd);

    auto* report_cmd = app.add_subcommand("report-data", "emit the CSV series the report renders");
    report_cmd->add_option("--in", in_dir, "records directory")->required();
    report_cmd->add_option("--out", out_dir, "output directory")->required();
    report_cmd->add_option("--horizon", horizon, "simulated semesters")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (!scenarios.empty()) {
        overrides.scenarios = scenarios;
    }
    if (replications > 0) {
        overrides.replications = replications;
    }
    if (n_students > 0) {
        overrides.n_students = n_students;
    }
    if (seed >= 0) {
        overrides.seed = static_cast<std::uint64_t>(seed);
    }
    if (workers >= 0) {
        overrides.workers = workers;
    }
    if (!out_dir.empty()) {
        overrides.out_dir = out_dir;
    }

    try {
        if (*validate_cmd) {
            auto config = resolve_config(config_path, {});
            auto inputs = load_inputs(config);
            print_graph("", *inputs.base_graph);
            print_graph("a1.", *inputs.a1_graph);
            std::cout << "archetypes=" << inputs.archetypes.size() << " scenarios=" << config.scenarios.size()
                      << " replications=" << config.replications << " n_students=" << config.n_students << "\n";
            load_targets(config.inputs.targets);
            load_bounds(config.inputs.bounds);
            return 0;
        }
        if (*run_cmd) {
            auto config  = resolve_config(config_path, overrides);
            auto inputs  = load_inputs(config);
            auto start   = std::chrono::steady_clock::now();
            auto summary = run_experiment(config, inputs);
            auto secs    = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::cout << "units=" << summary.record_files.size() << " records=" << summary.n_records
                      << " out=" << config.out_dir.string() << " seconds=" << format_fixed(secs, 1) << "\n";
            return 0;
        }
        if (*aggregate_cmd) {
            auto stats = in_factorial_order(aggregate_directory(in_dir, horizon));
            auto files = write_aggregates(stats, out_dir, snapshot);
            std::cout << "scenarios=" << stats.size() << " tables=" << join_ids(files) << "\n";
            return 0;
        }
        if (*calibrate_cmd) {
            auto config = resolve_config(config_path, overrides);
            if (budget > 0) {
                config.calibration.budget = budget;
            }
            auto inputs  = load_inputs(config);
            auto targets = load_targets(config.inputs.targets);
            auto bounds  = load_bounds(config.inputs.bounds);
            auto result  = calibrate(inputs, bounds, targets, config.calibration, resolved_workers(config));
            auto dir     = config.out_dir / "calibration";
            write_file(dir / "calibration_trace.csv", format_trace(bounds, result.trace));
            write_calibrated_inputs(config, result, bounds, dir);
            std::cout << "evaluations=" << result.trace.size() << " best_loss=" << format_double(result.best_loss)
                      << " out=" << dir.string() << "\n";
            return 0;
        }
        if (*report_cmd) {
            auto stats = in_factorial_order(aggregate_directory(in_dir, horizon));
            write_file(std::filesystem::path(out_dir) / "figure1_series.csv", format_figure1_series(stats));
            write_file(std::filesystem::path(out_dir) / "table2.csv", format_table2(stats));
            write_file(std::filesystem::path(out_dir) / "table3_semester8.csv", format_table3(stats, 8));
            // effects need the full 2x2x2 design
            if (stats.size() == 8) {
                std::vector<ScenarioOutcome> rows;
                for (const auto& s : stats) {
                    rows.push_back({parse_scenario_id(s.scenario_id()), s.dropout_rate(), s.mean_courses()});
                }
                write_file(std::filesystem::path(out_dir) / "factorial_effects.csv",
                           format_factorial_effects(factorial_main_effects(rows)));
            }
            std::cout << "scenarios=" << stats.size() << " out=" << out_dir << "\n";
            return 0;
        }
    }
    catch (const Error& e) {
        std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
        return 1;
    }
    catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
