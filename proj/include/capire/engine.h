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
#ifndef CAPIRE_ENGINE_H
#define CAPIRE_ENGINE_H

#include "capire/curriculum.h"
#include "capire/features.h"
#include "capire/policy.h"
#include "capire/population.h"
#include "capire/rng.h"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace capire
{

/// Dropout hazard weights on the logit scale. `belonging` and `backbone`
/// enter with a negative sign.
struct HazardWeights {
    double intercept = -3.0;
    double delay     = 0.0;
    double blocked   = 0.0;
    double distance  = 0.0;
    double stress    = 0.0;
    double belonging = 0.0;
    double backbone  = 0.0;

    bool operator==(const HazardWeights&) const = default;
};

struct EngineParams {
    std::vector<double> base_pass_prob; ///< per course index, historical pass rate
    std::vector<double> friction;       ///< per course index, subtracted on the logit scale
    double exam_conversion_prob = 0.35;
    HazardWeights hazard;
    double alpha_fail    = 0.0;
    double alpha_pending = 0.0;
    double alpha_block   = 0.0;
    double alpha_recover = 0.0;
    double beta_pass     = 0.0;
    double beta_fail     = 0.0;
    double beta_delay    = 0.0;
    /// Approvals per semester on nominal pace; <= 0 means courses / plan length.
    double nominal_per_semester = 0.0;
    int horizon                 = 12;

    bool operator==(const EngineParams&) const = default;
};

/// Names of the scalar parameters settable by key (engine_params.csv keys).
std::vector<std::string> engine_param_keys();
double get_engine_param(const EngineParams& params, std::string_view key);
void set_engine_param(EngineParams& params, std::string_view key, double value);

/// Scalars from `engine_params.csv` plus per-course values from `course_pass.csv`
/// (`course_id,base_pass_prob,friction`), which must cover every course.
EngineParams parse_engine_params(const std::map<std::string, std::string>& kv, std::string_view course_pass_csv,
                                 const CurriculumGraph& graph);
EngineParams load_engine_params(const std::filesystem::path& engine_params, const std::filesystem::path& course_pass,
                                const CurriculumGraph& graph);
std::string format_engine_params(const EngineParams& params);
void validate(const EngineParams& params, const CurriculumGraph& graph);

double logistic(double x);
double logit(double p);

enum class CourseOutcome
{
    pass_coursework,
    fail,
};

enum class TerminalEvent
{
    none,
    dropout,
    graduation,
};

std::string_view to_string(TerminalEvent e);
TerminalEvent parse_terminal_event(std::string_view text);

/// Counts the latent-state update reads.
struct SemesterEvents {
    int n_enrolled          = 0;
    int n_pass              = 0;
    int n_fail              = 0;
    int n_pending           = 0;
    double blocked_fraction = 0.0;
    double delay_fraction   = 0.0;
};

/// One agent-semester.
struct SemesterRecord {
    int agent_id = 0;
    int semester = 0;
    std::string archetype;
    Group group = Group::stable;
    CourseSet enrolled;
    CourseSet passed_coursework;
    CourseSet approved_by_exam;
    CourseSet failed;
    CourseSet approved; ///< cumulative, after this semester
    int n_approved_total = 0;
    double stress        = 0.0;
    double belonging     = 0.0;
    double hazard        = 0.0;
    StructuralSnapshot snapshot;
    TerminalEvent terminal_event = TerminalEvent::none;
};

/**
 * Semester loop for one scenario. Holds non-owning references to the
 * effects and parameters; both must outlive the engine.
 *
 * Phases per semester: enrolment, course outcomes, exam conversion,
 * structural and latent update, dropout draw.
 */
class Engine
{
public:
    Engine(const PolicyEffects& effects, const EngineParams& params);

    const CurriculumGraph& graph() const
    {
        return *m_graph;
    }

    /// Target load from stress and belonging, clamped to [1, max_load].
    int target_load(const AgentState& agent) const;

    /// Eligible courses (not approved, not pending, prerequisites pending or
    /// approved), best `target_load` by backbone, nominal semester,
    /// out-degree (descending), id.
    CourseSet select_enrolment(const AgentState& agent) const;

    double pass_probability(const AgentState& agent, CourseIndex course) const;
    /// Draws the outcome and applies it to the agent.
    CourseOutcome sample_course_outcome(AgentState& agent, CourseIndex course, const CounterRng& rng, int t) const;

    double conversion_probability() const;
    /// Each pending course converts independently; returns the newly approved.
    CourseSet convert_pending_exams(AgentState& agent, const CounterRng& rng, int t) const;

    /// Returns (stress', belonging').
    std::pair<double, double> update_latent_states(const AgentState& agent, const SemesterEvents& events) const;

    /// Fraction of the curriculum by which approvals trail nominal pace after semester t.
    double delay_fraction(const AgentState& agent, int t) const;

    double dropout_hazard(const AgentState& agent, const StructuralSnapshot& snapshot, double delay_fraction) const;

    /// Advance an active agent through semester t (1-based). Throws StateError on a terminal agent.
    SemesterRecord step_semester(AgentState& agent, const CounterRng& rng, int t) const;

    /// Semesters 1..horizon until graduation or dropout.
    std::vector<SemesterRecord> run_trajectory(AgentState& agent, const CounterRng& rng) const;

private:
    const CurriculumGraph* m_graph;
    const PolicyEffects* m_effects;
    const EngineParams* m_params;
    std::vector<CourseIndex> m_priority;
    std::vector<double> m_course_logit; ///< base logit + boost - scaled friction
    double m_nominal_per_semester;
};

} // namespace capire

#endif // CAPIRE_ENGINE_H
