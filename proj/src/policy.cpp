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
#include "capire/policy.h"
#include "capire/error.h"
#include "capire/table_io.h"

namespace capire
{

std::string PolicyScenario::id() const
{
    std::string s = "A0B0C0";
    s[1]          = a ? '1' : '0';
    s[3]          = b ? '1' : '0';
    s[5]          = c ? '1' : '0';
    return s;
}

PolicyScenario parse_scenario_id(std::string_view text)
{
    auto bit = [&](std::size_t pos) {
        if (text[pos] != '0' && text[pos] != '1') {
            throw InputError("malformed scenario id '" + std::string(text) + "'");
        }
        return text[pos] == '1';
    };
    if (text.size() != 6 || text[0] != 'A' || text[2] != 'B' || text[4] != 'C') {
        throw InputError("malformed scenario id '" + std::string(text) + "'");
    }
    return {bit(1), bit(3), bit(5)};
}

std::vector<PolicyScenario> enumerate_factorial()
{
    std::vector<PolicyScenario> out;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            for (int c = 0; c < 2; ++c) {
                out.push_back({a == 1, b == 1, c == 1});
            }
        }
    }
    return out;
}

void validate(const PolicyParams& p)
{
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw InputError(std::string("policy parameter out of range: ") + what);
        }
    };
    require(p.b1_pass_logit_boost >= 0.0, "b1_pass_logit_boost >= 0");
    require(p.b1_conversion_multiplier >= 1.0, "b1_conversion_multiplier >= 1");
    require(p.b1_friction_scale >= 0.0 && p.b1_friction_scale <= 1.0, "0 <= b1_friction_scale <= 1");
    require(p.b1_stress_relief >= 0.0, "b1_stress_relief >= 0");
    require(p.b1_belonging_gain >= 0.0, "b1_belonging_gain >= 0");
    require(p.c1_stress_relief >= 0.0, "c1_stress_relief >= 0");
    require(p.c1_belonging_gain >= 0.0, "c1_belonging_gain >= 0");
    require(p.c1_vulnerable_multiplier >= 0.0, "c1_vulnerable_multiplier >= 0");
}

PolicyParams parse_policy_params(const std::map<std::string, std::string>& kv)
{
    PolicyParams p;
    std::map<std::string, double*> numeric = {
        {"b1_pass_logit_boost", &p.b1_pass_logit_boost},
        {"b1_conversion_multiplier", &p.b1_conversion_multiplier},
        {"b1_friction_scale", &p.b1_friction_scale},
        {"b1_stress_relief", &p.b1_stress_relief},
        {"b1_belonging_gain", &p.b1_belonging_gain},
        {"c1_stress_relief", &p.c1_stress_relief},
        {"c1_belonging_gain", &p.c1_belonging_gain},
        {"c1_vulnerable_multiplier", &p.c1_vulnerable_multiplier},
    };
    for (const auto& [key, value] : kv) {
        if (auto it = numeric.find(key); it != numeric.end()) {
            *it->second = parse_double(value, key);
        }
        else if (key == "b1_target") {
            if (value == "backbone") {
                p.b1_target = {};
            }
            else if (value.starts_with("list:")) {
                p.b1_target.backbone = false;
                p.b1_target.ids.clear();
                for (auto& id : split(std::string_view(value).substr(5), ' ')) {
                    if (!id.empty()) {
                        p.b1_target.ids.push_back(id);
                    }
                }
            }
            else {
                throw InputError("b1_target must be 'backbone' or 'list:<ids>'");
            }
        }
        else {
            throw InputError("unknown policy parameter '" + key + "'");
        }
    }
    validate(p);
    return p;
}

PolicyParams load_policy_params(const std::filesystem::path& path)
{
    return parse_policy_params(read_key_values(path));
}

std::map<std::string, std::string> to_key_values(const PolicyParams& p)
{
    std::string target = "backbone";
    if (!p.b1_target.backbone) {
        target = "list:";
        for (std::size_t i = 0; i < p.b1_target.ids.size(); ++i) {
            target += (i ? " " : "") + p.b1_target.ids[i];
        }
    }
    return {
        {"b1_pass_logit_boost", format_double(p.b1_pass_logit_boost)},
        {"b1_conversion_multiplier", format_double(p.b1_conversion_multiplier)},
        {"b1_friction_scale", format_double(p.b1_friction_scale)},
        {"b1_stress_relief", format_double(p.b1_stress_relief)},
        {"b1_belonging_gain", format_double(p.b1_belonging_gain)},
        {"c1_stress_relief", format_double(p.c1_stress_relief)},
        {"c1_belonging_gain", format_double(p.c1_belonging_gain)},
        {"c1_vulnerable_multiplier", format_double(p.c1_vulnerable_multiplier)},
        {"b1_target", target},
    };
}

PolicyEffects effects(const PolicyScenario& scenario, const PolicyParams& params,
                      std::shared_ptr<const CurriculumGraph> base_graph,
                      std::shared_ptr<const CurriculumGraph> a1_graph)
{
    if (!base_graph) {
        throw InputError("base curriculum graph is required");
    }
    if (scenario.a && !a1_graph) {
        throw InputError("scenario " + scenario.id() + " requires a redesigned (A1) curriculum");
    }
    PolicyEffects e;
    e.scenario   = scenario;
    e.redesigned = scenario.a;
    e.graph      = scenario.a ? std::move(a1_graph) : std::move(base_graph);
    e.pass_logit_boost.assign(static_cast<std::size_t>(e.graph->size()), 0.0);

    if (scenario.b) {
        auto targets = params.b1_target.backbone ? e.graph->backbone()
                                                 : make_course_set(*e.graph, params.b1_target.ids);
        targets.for_each([&](CourseIndex c) {
            e.pass_logit_boost[static_cast<std::size_t>(c)] = params.b1_pass_logit_boost;
        });
        e.exam_conversion_multiplier = params.b1_conversion_multiplier;
        e.friction_scale             = params.b1_friction_scale;
        for (auto& r : e.stress_relief) {
            r += params.b1_stress_relief;
        }
        for (auto& g : e.belonging_gain) {
            g += params.b1_belonging_gain;
        }
    }
    if (scenario.c) {
        for (auto group : {Group::vulnerable, Group::stable}) {
            double scale = group == Group::vulnerable ? params.c1_vulnerable_multiplier : 1.0;
            e.stress_relief[static_cast<std::size_t>(group)] += scale * params.c1_stress_relief;
            e.belonging_gain[static_cast<std::size_t>(group)] += scale * params.c1_belonging_gain;
        }
    }
    return e;
}

} // namespace capire
