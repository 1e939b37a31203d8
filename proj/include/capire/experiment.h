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
#ifndef CAPIRE_EXPERIMENT_H
#define CAPIRE_EXPERIMENT_H

#include "capire/aggregate.h"
#include "capire/config.h"
#include "capire/engine.h"
#include "capire/policy.h"
#include "capire/population.h"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace capire
{

/// Everything a run reads, loaded and validated up front.
struct ModelInputs {
    std::shared_ptr<const CurriculumGraph> base_graph;
    std::shared_ptr<const CurriculumGraph> a1_graph;
    ArchetypeTable archetypes;
    EngineParams engine;
    PolicyParams policy;
};

ModelInputs load_inputs(const ExperimentConfig& config);

/// Called once per agent with its full trajectory.
using AgentVisitor = std::function<void(const AgentState& final_state, const std::vector<SemesterRecord>& records)>;

/// Simulate one cohort (one scenario, one replication) and hand each
/// trajectory to `visit` in agent order.
void simulate_cohort(const ModelInputs& inputs, const PolicyScenario& scenario, std::uint64_t seed, int replication,
                     int n_students, const AgentVisitor& visit);

/// Reduce one cohort in memory, optionally also rendering its record file body.
ScenarioStats simulate_unit(const ModelInputs& inputs, const PolicyScenario& scenario, std::uint64_t seed,
                            int replication, int n_students, std::string* record_body = nullptr);

struct RunSummary {
    std::vector<ScenarioStats> stats; ///< factorial order
    std::vector<std::string> record_files;
    long long n_records = 0;
};

/**
 * Run every (scenario, replication) unit, writing
 * `<out>/records/<scenario>_<rep>.csv[.gz]`, the aggregate tables under
 * `<out>/tables` and `<out>/manifest.txt`. Units are spread over the
 * configured number of workers; outputs do not depend on that number.
 */
RunSummary run_experiment(const ExperimentConfig& config, const ModelInputs& inputs);

/// Hash of every setting that can change results (workers and paths excluded).
std::string config_hash(const ExperimentConfig& config, const ModelInputs& inputs);

/// Run `task(i)` for i in [0, n) on `workers` threads; rethrows the first failure.
void parallel_for(int n, int workers, const std::function<void(int)>& task);

} // namespace capire

#endif // CAPIRE_EXPERIMENT_H
