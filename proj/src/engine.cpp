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
#include "capire/engine.h"
#include "capire/error.h"
#include "capire/table_io.h"

#include <algorithm>
#include <cmath>

namespace capire
{

namespace
{

struct ParamSlot {
    const char* key;
    double EngineParams::*scalar;
    double HazardWeights::*weight;
};

constexpr ParamSlot param_slots[] = {
    {"exam_conversion_prob", &EngineParams::exam_conversion_prob, nullptr},
    {"eta0", nullptr, &HazardWeights::intercept},
    {"eta1", nullptr, &HazardWeights::delay},
    {"eta2", nullptr, &HazardWeights::blocked},
    {"eta3", nullptr, &HazardWeights::distance},
    {"eta4", nullptr, &HazardWeights::stress},
    {"eta5", nullptr, &HazardWeights::belonging},
    {"eta6", nullptr, &HazardWeights::backbone},
    {"alpha_fail", &EngineParams::alpha_fail, nullptr},
    {"alpha_pending", &EngineParams::alpha_pending, nullptr},
    {"alpha_block", &EngineParams::alpha_block, nullptr},
    {"alpha_recover", &EngineParams::alpha_recover, nullptr},
    {"beta_pass", &EngineParams::beta_pass, nullptr},
    {"beta_fail", &EngineParams::beta_fail, nullptr},
    {"beta_delay", &EngineParams::beta_delay, nullptr},
    {"nominal_per_semester", &EngineParams::nominal_per_semester, nullptr},
};

const ParamSlot* find_slot(std::string_view key)
{
    for (const auto& s : param_slots) {
        if (key == s.key) {
            return &s;
        }
    }
    return nullptr;
}

} // namespace

std::vector<std::string> engine_param_keys()
{
    std::vector<std::string> keys;
    for (const auto& s : param_slots) {
        keys.emplace_back(s.key);
    }
    keys.emplace_back("horizon");
    return keys;
}

double get_engine_param(const EngineParams& params, std::string_view key)
{
    if (key == "horizon") {
        return params.horizon;
    }
    const auto* slot = find_slot(key);
    if (!slot) {
        throw InputError("unknown engine parameter '" + std::string(key) + "'");
    }
    return slot->scalar ? params.*(slot->scalar) : params.hazard.*(slot->weight);
}

void set_engine_param(EngineParams& params, std::string_view key, double value)
{
    if (key == "horizon") {
        params.horizon = static_cast<int>(std::lround(value));
        return;
    }
    const auto* slot = find_slot(key);
    if (!slot) {
        throw InputError("unknown engine parameter '" + std::string(key) + "'");
    }
    if (slot->scalar) {
        params.*(slot->scalar) = value;
    }
    else {
        params.hazard.*(slot->weight) = value;
    }
}

void validate(const EngineParams& p, const CurriculumGraph& graph)
{
    const auto n = static_cast<std::size_t>(graph.size());
    if (p.base_pass_prob.size() != n || p.friction.size() != n) {
        throw InputError("engine parameters must cover every course");
    }
    for (std::size_t c = 0; c < n; ++c) {
        if (!(p.base_pass_prob[c] >= 0.0 && p.base_pass_prob[c] <= 1.0)) {
            throw InputError("base_pass_prob of " + graph.course(static_cast<CourseIndex>(c)).id + " outside [0,1]");
        }
        if (!(p.friction[c] >= 0.0)) {
            throw InputError("friction of " + graph.course(static_cast<CourseIndex>(c)).id + " must be >= 0");
        }
    }
    if (!(p.exam_conversion_prob >= 0.0 && p.exam_conversion_prob <= 1.0)) {
        throw InputError("exam_conversion_prob outside [0,1]");
    }
    for (double v : {p.alpha_fail, p.alpha_pending, p.alpha_block, p.alpha_recover, p.beta_pass, p.beta_fail,
                     p.beta_delay}) {
        if (!(v >= 0.0)) {
            throw InputError("latent-update coefficients must be >= 0");
        }
    }
    if (p.horizon < 1) {
        throw InputError("horizon must be >= 1");
    }
}

EngineParams parse_engine_params(const std::map<std::string, std::string>& kv, std::string_view course_pass_csv,
                                 const CurriculumGraph& graph)
{
    EngineParams p;
    for (const auto& [key, value] : kv) {
        set_engine_param(p, key, parse_double(value, key));
    }
    auto t = parse_table(course_pass_csv, "course_pass.csv");
    require_header(t, {"course_id", "base_pass_prob", "friction"});
    const auto n = static_cast<std::size_t>(graph.size());
    p.base_pass_prob.assign(n, -1.0);
    p.friction.assign(n, 0.0);
    CourseSet seen;
    for (const auto& row : t.rows) {
        auto c = graph.index_of(row[0]);
        if (seen.contains(c)) {
            throw InputError("course_pass.csv: duplicate row for " + row[0]);
        }
        seen.insert(c);
        p.base_pass_prob[static_cast<std::size_t>(c)] = parse_double(row[1], "base_pass_prob of " + row[0]);
        p.friction[static_cast<std::size_t>(c)]       = parse_double(row[2], "friction of " + row[0]);
    }
    if (seen != graph.all()) {
        throw InputError("course_pass.csv: missing course " + course_ids(graph, graph.all() - seen).front());
    }
    validate(p, graph);
    return p;
}

EngineParams load_engine_params(const std::filesystem::path& engine_params, const std::filesystem::path& course_pass,
                                const CurriculumGraph& graph)
{
    return parse_engine_params(read_key_values(engine_params), read_file(course_pass), graph);
}

std::string format_engine_params(const EngineParams& params)
{
    std::string out = "key,value\n";
    for (const auto& key : engine_param_keys()) {
        out += key + "," + format_double(get_engine_param(params, key)) + "\n";
    }
    return out;
}

double logistic(double x)
{
    return 1.0 / (1.0 + std::exp(-x));
}

double logit(double p)
{
    return std::log(p) - std::log1p(-p);
}

std::string_view to_string(TerminalEvent e)
{
    switch (e) {
    case TerminalEvent::dropout:
        return "dropout";
    case TerminalEvent::graduation:
        return "graduation";
    default:
        return "none";
    }
}

TerminalEvent parse_terminal_event(std::string_view text)
{
    if (text == "none") {
        return TerminalEvent::none;
    }
    if (text == "dropout") {
        return TerminalEvent::dropout;
    }
    if (text == "graduation") {
        return TerminalEvent::graduation;
    }
    throw InputError("unknown terminal event '" + std::string(text) + "'");
}

Engine::Engine(const PolicyEffects& effects, const EngineParams& params)
    : m_graph(effects.graph.get())
    , m_effects(&effects)
    , m_params(&params)
{
    if (!m_graph) {
        throw InputError("policy effects carry no curriculum graph");
    }
    validate(params, *m_graph);
    const auto& g = *m_graph;
    m_priority.resize(static_cast<std::size_t>(g.size()));
    for (CourseIndex c = 0; c < g.size(); ++c) {
        m_priority[static_cast<std::size_t>(c)] = c;
    }
    std::sort(m_priority.begin(), m_priority.end(), [&](CourseIndex a, CourseIndex b) {
        const auto& ca = g.course(a);
        const auto& cb = g.course(b);
        if (ca.backbone != cb.backbone) {
            return ca.backbone;
        }
        if (ca.semester != cb.semester) {
            return ca.semester < cb.semester;
        }
        if (g.out_degree(a) != g.out_degree(b)) {
            return g.out_degree(a) > g.out_degree(b);
        }
        return ca.id < cb.id;
    });
    m_course_logit.resize(static_cast<std::size_t>(g.size()));
    for (std::size_t c = 0; c < m_course_logit.size(); ++c) {
        m_course_logit[c] = logit(params.base_pass_prob[c]) + effects.pass_logit_boost[c] -
                            params.friction[c] * effects.friction_scale;
    }
    m_nominal_per_semester = params.nominal_per_semester > 0.0
                                 ? params.nominal_per_semester
                                 : static_cast<double>(g.size()) / static_cast<double>(g.plan_length());
}

int Engine::target_load(const AgentState& agent) const
{
    const int max_load = agent.archetype.max_load;
    auto load = std::lround(max_load * (1.0 - 0.5 * agent.stress) * (0.5 + 0.5 * agent.belonging));
    return static_cast<int>(std::clamp<long>(load, 1, max_load));
}

CourseSet Engine::select_enrolment(const AgentState& agent) const
{
    const auto open = agent.approved | agent.pending;
    int load        = target_load(agent);
    CourseSet chosen;
    for (auto c : m_priority) {
        if (load == 0) {
            break;
        }
        if (!open.contains(c) && m_graph->prerequisites(c).is_subset_of(open)) {
            chosen.insert(c);
            --load;
        }
    }
    return chosen;
}

double Engine::pass_probability(const AgentState& agent, CourseIndex course) const
{
    return logistic(m_course_logit[static_cast<std::size_t>(course)] + agent.archetype.pass_logit_shift);
}

CourseOutcome Engine::sample_course_outcome(AgentState& agent, CourseIndex course, const CounterRng& rng,
                                            int t) const
{
    double u = rng.uniform(t, DrawPhase::outcome, static_cast<std::uint64_t>(course));
    if (u < pass_probability(agent, course)) {
        agent.pending.insert(course);
        return CourseOutcome::pass_coursework;
    }
    auto& count = agent.fail_count[static_cast<std::size_t>(course)];
    if (count < 255) {
        ++count;
    }
    return CourseOutcome::fail;
}

double Engine::conversion_probability() const
{
    return std::min(1.0, m_params->exam_conversion_prob * m_effects->exam_conversion_multiplier);
}

CourseSet Engine::convert_pending_exams(AgentState& agent, const CounterRng& rng, int t) const
{
    const double q = conversion_probability();
    CourseSet converted;
    agent.pending.for_each([&](CourseIndex c) {
        if (rng.uniform(t, DrawPhase::conversion, static_cast<std::uint64_t>(c)) < q) {
            converted.insert(c);
        }
    });
    agent.pending -= converted;
    agent.approved |= converted;
    return converted;
}

std::pair<double, double> Engine::update_latent_states(const AgentState& agent, const SemesterEvents& ev) const
{
    const auto& p       = *m_params;
    const double denom  = std::max(1, ev.n_enrolled);
    const double pass   = ev.n_pass / denom;
    const double fail   = ev.n_fail / denom;
    const auto group    = agent.archetype.group;
    double stress       = agent.stress + p.alpha_fail * fail + p.alpha_pending * std::min(1.0, ev.n_pending / 4.0) +
                    p.alpha_block * ev.blocked_fraction - p.alpha_recover * pass -
                    m_effects->stress_relief_for(group);
    double belonging = agent.belonging + p.beta_pass * pass - p.beta_fail * fail - p.beta_delay * ev.delay_fraction +
                       m_effects->belonging_gain_for(group);
    return {clamp01(stress), clamp01(belonging)};
}

double Engine::delay_fraction(const AgentState& agent, int t) const
{
    double behind = m_nominal_per_semester * t - agent.approved.size();
    return std::max(0.0, behind) / m_graph->size();
}

double Engine::dropout_hazard(const AgentState& agent, const StructuralSnapshot& s, double delay) const
{
    const auto& w = m_params->hazard;
    double blocked = static_cast<double>(s.blocked_credits) / m_graph->total_credits();
    double x = w.intercept + w.delay * delay + w.blocked * blocked + w.distance * s.distance_to_graduation +
               w.stress * agent.stress - w.belonging * agent.belonging - w.backbone * s.backbone_completion;
    return clamp01(agent.archetype.hazard_sensitivity * logistic(x));
}

SemesterRecord Engine::step_semester(AgentState& agent, const CounterRng& rng, int t) const
{
    if (!agent.active()) {
        throw StateError("agent " + std::to_string(agent.agent_id) + " is no longer active");
    }
    SemesterRecord rec;
    rec.agent_id  = agent.agent_id;
    rec.semester  = t;
    rec.archetype = agent.archetype.id;
    rec.group     = agent.archetype.group;

    const auto all = m_graph->all();
    if (agent.approved != all) {
        // 1. enrolment, 2. outcomes
        rec.enrolled = select_enrolment(agent);
        rec.enrolled.for_each([&](CourseIndex c) {
            if (sample_course_outcome(agent, c, rng, t) == CourseOutcome::pass_coursework) {
                rec.passed_coursework.insert(c);
            }
            else {
                rec.failed.insert(c);
            }
        });
        // 3. exam conversion
        rec.approved_by_exam = convert_pending_exams(agent, rng, t);
    }

    // 4. structural and latent update
    rec.snapshot = compute_snapshot(*m_graph, agent.approved);
    SemesterEvents ev;
    ev.n_enrolled       = rec.enrolled.size();
    ev.n_pass           = rec.passed_coursework.size();
    ev.n_fail           = rec.failed.size();
    ev.n_pending        = agent.pending.size();
    ev.blocked_fraction = static_cast<double>(rec.snapshot.blocked_credits) / m_graph->total_credits();
    ev.delay_fraction   = delay_fraction(agent, t);
    std::tie(agent.stress, agent.belonging) = update_latent_states(agent, ev);
    agent.semester = t;

    // 5. exit
    if (agent.approved == all) {
        agent.terminal      = Terminal::graduated;
        agent.exit_semester = t;
        rec.terminal_event  = TerminalEvent::graduation;
    }
    else {
        rec.hazard = dropout_hazard(agent, rec.snapshot, ev.delay_fraction);
        if (rng.uniform(t, DrawPhase::dropout, 0) < rec.hazard) {
            agent.terminal      = Terminal::dropped;
            agent.exit_semester = t;
            rec.terminal_event  = TerminalEvent::dropout;
        }
    }

    rec.approved         = agent.approved;
    rec.n_approved_total = agent.approved.size();
    rec.stress           = agent.stress;
    rec.belonging        = agent.belonging;
    return rec;
}

std::vector<SemesterRecord> Engine::run_trajectory(AgentState& agent, const CounterRng& rng) const
{
    std::vector<SemesterRecord> records;
    for (int t = agent.semester + 1; t <= m_params->horizon && agent.active(); ++t) {
        records.push_back(step_semester(agent, rng, t));
    }
    return records;
}

} // namespace capire
