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
#ifndef CAPIRE_CALIBRATION_H
#define CAPIRE_CALIBRATION_H

#include "capire/config.h"
#include "capire/experiment.h"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace capire
{

/// One calibration target. A quantity ending in `_min` (`_max`) is a floor
/// (ceiling) on the quantity without the suffix and costs nothing when met.
struct Target {
    std::string quantity;
    double target    = 0.0;
    double tolerance = 1.0;
    double weight    = 1.0;

    bool operator==(const Target&) const = default;
};

std::vector<Target> parse_targets(std::string_view csv);
std::vector<Target> load_targets(const std::filesystem::path& path);

/// Observed quantity a target reads (suffix stripped).
std::string observed_name(const Target& target);

/// Sum of weight * ((observed - target) / tolerance)^2 over targets, with
/// one-sided targets counting only violations. Throws InputError on a missing quantity.
double score(const std::vector<Target>& targets, const std::map<std::string, double>& observed);

struct Bound {
    std::string parameter;
    double low  = 0.0;
    double high = 0.0;

    bool operator==(const Bound&) const = default;
};

std::vector<Bound> parse_bounds(std::string_view csv);
std::vector<Bound> load_bounds(const std::filesystem::path& path);

/// Tunable parameters: engine keys, `policy.<key>` and `archetype.<id>.<field>`.
double get_parameter(const ModelInputs& inputs, std::string_view name);
void set_parameter(ModelInputs& inputs, std::string_view name, double value);

/// Spearman rank correlation with average ranks; 0 when either side is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/**
 * Quantities the targets may name, from an in-memory run of `scenarios`.
 *
 * Baseline (A0B0C0) keys: baseline_noncompletion, baseline_mean_courses,
 * baseline_median_courses, hard_dropout_rate, first_year_dropout_share,
 * zero_course_leaver_share, mean_stress, mean_belonging,
 * semester8_backbone_mean, semester8_blocked_median, semester8_distance_mean and
 * early_failure_blockage_rho (Spearman between semester-2 backbone failures and
 * semester-8 blocked credits among agents still enrolled at semester 8).
 * Every scenario S also gets `S.dropout_rate`, `S.mean_courses`,
 * `S.median_courses`, `S.mean_stress`, `S.mean_belonging`, `S.backbone_s8`,
 * `S.blocked_median_s8` and `S.distance_s8`.
 */
std::map<std::string, double> evaluate(const ModelInputs& inputs, const std::vector<PolicyScenario>& scenarios,
                                       std::uint64_t seed, int n_students, int replications, int workers = 1);

/// Scenarios a target list needs (always includes A0B0C0).
std::vector<PolicyScenario> scenarios_for(const std::vector<Target>& targets);

struct TraceRow {
    int evaluation = 0;
    std::string phase; ///< start, noise, lhs, descent
    std::vector<double> point;
    double loss        = 0.0;
    double best_so_far = 0.0;
};

struct CalibrationResult {
    std::vector<double> best_point;
    double best_loss = 0.0;
    ModelInputs best_inputs;
    std::vector<TraceRow> trace;
};

/// Seeded start point, then Latin hypercube, then coordinate descent with
/// halving steps, until `settings.budget` evaluations are spent.
CalibrationResult calibrate(const ModelInputs& start, const std::vector<Bound>& bounds,
                            const std::vector<Target>& targets, const CalibrationSettings& settings, int workers = 1);

std::string format_trace(const std::vector<Bound>& bounds, const std::vector<TraceRow>& trace);

/// Writes engine_params.csv, archetypes.csv, policy_params.csv,
/// calibrated_parameters.csv and a calibrated.cfg pointing at them.
void write_calibrated_inputs(const ExperimentConfig& config, const CalibrationResult& result,
                             const std::vector<Bound>& bounds, const std::filesystem::path& out_dir);

} // namespace capire

#endif // CAPIRE_CALIBRATION_H
