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
// Randomized property checks on engine trajectories. Shared by the engine
// unit tests and the acceptance runner.
#ifndef CAPIRE_ENGINE_INVARIANTS_H
#define CAPIRE_ENGINE_INVARIANTS_H

#include "capire/engine.h"
#include "capire/error.h"
#include "capire/features.h"

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace capire::test
{

struct InvariantReport {
    int trajectories = 0;
    long long records = 0;
    int failures     = 0;
    std::string first_failure;

    void fail(const std::string& what)
    {
        if (failures++ == 0) {
            first_failure = what;
        }
    }
};

/// Random but valid engine parameters for `graph`.
inline EngineParams random_engine_params(std::mt19937_64& rng, const CurriculumGraph& graph)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    EngineParams p;
    for (int c = 0; c < graph.size(); ++c) {
        p.base_pass_prob.push_back(0.05 + 0.9 * u(rng));
        p.friction.push_back(u(rng));
    }
    p.exam_conversion_prob = u(rng);
    p.hazard = {-6.0 + 4.0 * u(rng), 2 * u(rng), 2 * u(rng), 2 * u(rng), 2 * u(rng), 2 * u(rng), 2 * u(rng)};
    p.alpha_fail    = 0.4 * u(rng);
    p.alpha_pending = 0.4 * u(rng);
    p.alpha_block   = 0.4 * u(rng);
    p.alpha_recover = 0.4 * u(rng);
    p.beta_pass     = 0.4 * u(rng);
    p.beta_fail     = 0.4 * u(rng);
    p.beta_delay    = 0.4 * u(rng);
    return p;
}

inline Archetype random_archetype(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Archetype a;
    a.id                 = "random";
    a.group              = u(rng) < 0.5 ? Group::vulnerable : Group::stable;
    a.pass_logit_shift   = -2.0 + 4.0 * u(rng);
    a.hazard_sensitivity = 0.2 + 4.0 * u(rng);
    a.stress0_mean       = u(rng);
    a.stress0_sd         = 0.5 * u(rng);
    a.belonging0_mean    = u(rng);
    a.belonging0_sd      = 0.5 * u(rng);
    a.max_load           = 1 + static_cast<int>(7 * u(rng));
    return a;
}

/**
 * Steps `n` agents semester by semester under randomized parameters and
 * policies on `base` / `a1`, checking after every step:
 * contiguous semesters, absorbing terminal states, monotone approvals,
 * disjoint approved and pending sets, enrolment eligibility and load,
 * latent states and hazard in [0,1], logged snapshot equal to the snapshot
 * recomputed from the approved set, and the hazard's response signs to
 * stress and belonging by finite differences.
 */
inline InvariantReport check_engine_invariants(const std::shared_ptr<const CurriculumGraph>& base,
                                               const std::shared_ptr<const CurriculumGraph>& a1, int n,
                                               std::uint64_t seed)
{
    InvariantReport report;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto scenarios = enumerate_factorial();

    // fresh parameters every 50 trajectories; the engine refers to both
    EngineParams params;
    PolicyEffects fx;
    std::unique_ptr<Engine> engine;
    for (int i = 0; i < n; ++i) {
        if (i % 50 == 0) {
            engine.reset();
            auto scenario = scenarios[static_cast<std::size_t>(i / 50) % scenarios.size()];
            PolicyParams pp;
            pp.b1_pass_logit_boost      = 2 * u(rng);
            pp.b1_conversion_multiplier = 1 + 2 * u(rng);
            pp.b1_friction_scale        = u(rng);
            fx                          = effects(scenario, pp, base, a1);
            params                      = random_engine_params(rng, *fx.graph);
            engine                      = std::make_unique<Engine>(fx, params);
        }
        const auto& g   = engine->graph();
        auto archetype  = random_archetype(rng);
        CounterRng crng(seed, static_cast<std::uint64_t>(i / 50), static_cast<std::uint64_t>(i));
        auto agent      = init_agent(archetype, i, crng);
        auto tag        = [&](int t) {
            return "trajectory " + std::to_string(i) + " semester " + std::to_string(t) + ": ";
        };
        ++report.trajectories;

        int last_total = 0;
        for (int t = 1; t <= params.horizon && agent.active(); ++t) {
            const auto before = agent;
            const auto status = before.status_vector(g.size());
            auto rec          = engine->step_semester(agent, crng, t);
            ++report.records;

            if (rec.semester != t || agent.semester != t) {
                report.fail(tag(t) + "semester counter out of step");
            }
            if (rec.n_approved_total < last_total || !before.approved.is_subset_of(agent.approved)) {
                report.fail(tag(t) + "approvals decreased");
            }
            last_total = rec.n_approved_total;
            if (!(agent.approved & agent.pending).empty()) {
                report.fail(tag(t) + "approved and pending overlap");
            }
            if (rec.enrolled.size() > archetype.max_load) {
                report.fail(tag(t) + "load above max_load");
            }
            if ((rec.passed_coursework | rec.failed) != rec.enrolled ||
                !(rec.passed_coursework & rec.failed).empty()) {
                report.fail(tag(t) + "outcomes do not partition enrolment");
            }
            rec.enrolled.for_each([&](CourseIndex c) {
                if (before.approved.contains(c) || before.pending.contains(c) ||
                    !satisfied_for_enrolment(g, status, c)) {
                    report.fail(tag(t) + "ineligible enrolment in " + g.course(c).id);
                }
            });
            if (!rec.approved_by_exam.is_subset_of(before.pending | rec.passed_coursework)) {
                report.fail(tag(t) + "approval without passed coursework");
            }
            for (double v : {agent.stress, agent.belonging, rec.hazard}) {
                if (!(v >= 0.0 && v <= 1.0)) {
                    report.fail(tag(t) + "latent state or hazard outside [0,1]");
                }
            }
            if (rec.snapshot != compute_snapshot(g, rec.approved) || rec.approved != agent.approved) {
                report.fail(tag(t) + "logged snapshot differs from recomputed snapshot");
            }
            bool terminal = rec.terminal_event != TerminalEvent::none;
            if (terminal == agent.active()) {
                report.fail(tag(t) + "terminal event and agent state disagree");
            }
            if (rec.terminal_event == TerminalEvent::graduation && agent.approved != g.all()) {
                report.fail(tag(t) + "graduation with courses outstanding");
            }

            // finite-difference signs of the hazard around the current state
            if (agent.active()) {
                const double eps = 1e-4;
                auto probe       = agent;
                probe.stress     = 0.05 + 0.9 * u(rng);
                probe.belonging  = 0.05 + 0.9 * u(rng);
                double delay     = engine->delay_fraction(probe, t);
                double h0        = engine->dropout_hazard(probe, rec.snapshot, delay);
                auto hi_stress   = probe;
                hi_stress.stress += eps;
                auto hi_belong   = probe;
                hi_belong.belonging += eps;
                double hs = engine->dropout_hazard(hi_stress, rec.snapshot, delay);
                double hb = engine->dropout_hazard(hi_belong, rec.snapshot, delay);
                bool saturated = h0 >= 1.0;
                if (!saturated && params.hazard.stress > 0 && !(hs > h0)) {
                    report.fail(tag(t) + "hazard does not rise with stress");
                }
                if (!saturated && params.hazard.belonging > 0 && !(hb < h0)) {
                    report.fail(tag(t) + "hazard does not fall with belonging");
                }
            }
        }

        if (agent.active() && agent.semester != params.horizon) {
            report.fail("trajectory " + std::to_string(i) + ": active agent stopped before the horizon");
        }
        if (!agent.active()) {
            // absorbing: stepping again must throw and leave the agent untouched
            auto frozen = agent;
            bool threw  = false;
            try {
                engine->step_semester(agent, crng, agent.semester + 1);
            }
            catch (const StateError&) {
                threw = true;
            }
            if (!threw || !(agent == frozen)) {
                report.fail("trajectory " + std::to_string(i) + ": terminal state is not absorbing");
            }
        }
    }
    return report;
}

} // namespace capire::test

#endif // CAPIRE_ENGINE_INVARIANTS_H
