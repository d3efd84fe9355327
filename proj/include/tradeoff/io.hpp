// Copyright 2026 The Tradeoff Forge Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON and CSV serialization for the public types.

#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tradeoff/chain.hpp"
#include "tradeoff/curve.hpp"
#include "tradeoff/errors.hpp"
#include "tradeoff/lp.hpp"
#include "tradeoff/model.hpp"
#include "tradeoff/oracle.hpp"
#include "tradeoff/relax.hpp"
#include "tradeoff/sim.hpp"

namespace tradeoff {

using json = nlohmann::ordered_json;

namespace io {

/// Non-finite doubles become null (JSON has no infinity).
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline std::string csv_number(double v) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json to_json(const ModelParams& p) {
    return {{"alpha", p.alpha}, {"A", p.batch}, {"S", p.max_tx}, {"Q", p.buffer}, {"power", p.power}};
}

inline ModelParams params_from_json(const json& j) {
    try {
        ModelParams p;
        p.alpha = j.at("alpha").get<double>();
        p.batch = j.at("A").get<int>();
        p.max_tx = j.at("S").get<int>();
        p.buffer = j.at("Q").get<int>();
        p.power = j.at("power").get<std::vector<double>>();
        return validate_params(p);
    } catch (const json::exception& e) {
        throw ValidationError(ValidationCode::BadRange, std::string("params: ") + e.what());
    }
}

inline json to_json(const PerfPoint& z) { return {{"power", z.power}, {"delay", z.delay}}; }

inline json to_json(const ThresholdPolicy& t) {
    json j{{"thresholds", t.thresholds}, {"mixing", nullptr}};
    if (t.mixing) j["mixing"] = {{"s_star", t.mixing->s_star}, {"p", t.mixing->p}};
    return j;
}

inline json to_json(const Policy& f) { return {{"rows", f.to_rows()}}; }

inline ThresholdPolicy threshold_policy_from_json(const json& j) {
    try {
        ThresholdPolicy t{j.at("thresholds").get<std::vector<int>>(), std::nullopt};
        if (j.contains("mixing") && !j.at("mixing").is_null()) {
            t.mixing = ThresholdPolicy::Mixing{j["mixing"].at("s_star").get<int>(), j["mixing"].at("p").get<double>()};
        }
        return t;
    } catch (const json::exception& e) {
        throw ValidationError(ValidationCode::InvalidPolicy, std::string("threshold policy: ") + e.what());
    }
}

/// Accepts {"rows": [[...]]}, {"actions": [...]} or {"thresholds": [...], "mixing": {...}}.
inline Policy policy_from_json(const ModelParams& params, const json& j) {
    try {
        if (j.contains("rows")) return Policy::from_rows(params, j.at("rows").get<std::vector<std::vector<double>>>());
        if (j.contains("actions")) {
            const auto a = j.at("actions").get<std::vector<int>>();
            return Policy::deterministic(params, a);
        }
        if (j.contains("thresholds")) {
            const auto t = threshold_policy_from_json(j);
            return t.mixing ? mixed_from_thresholds(params, t) : deterministic_from_thresholds(params, t);
        }
    } catch (const json::exception& e) {
        throw ValidationError(ValidationCode::InvalidPolicy, std::string("policy: ") + e.what());
    }
    throw ValidationError(ValidationCode::InvalidPolicy, "policy needs one of rows, actions, thresholds");
}

inline json to_json(const SteadyState& ss) { return {{"pi", ss.pi}, {"recurrent", ss.recurrent}}; }

inline json to_json(const TradeoffCurve& c) {
    json verts = json::array();
    for (const auto& v : c.vertices) {
        verts.push_back({{"power", v.point.power}, {"delay", v.point.delay}, {"policies", v.policies}});
    }
    json segs = json::array();
    for (const auto& s : c.segments) {
        segs.push_back({{"upper_thresholds", s.upper_thresholds},
                        {"lower_thresholds", s.lower_thresholds},
                        {"s_star", s.s_star},
                        {"state", s.state},
                        {"slope", number(s.slope)}});
    }
    return {{"vertices", verts},
            {"segments", segs},
            {"stats",
             {{"iterations", c.stats.iterations},
              {"candidate_evaluations", c.stats.candidate_evaluations},
              {"stationary_solves", c.stats.stationary_solves}}}};
}

inline json to_json(const MinDelayResult& r) { return {{"delay", r.delay}, {"policy", to_json(r.policy)}}; }

inline json to_json(const RelaxSolution& r) {
    return {{"eta", r.eta},   {"s_of_q", r.s_of_q},         {"bias", r.bias},
            {"avg_cost", r.avg_cost}, {"iterations", r.iterations}};
}

inline json to_json(const LpSolution& s) {
    json j{{"status", simplex::to_string(s.status)}};
    if (s.status == LpStatus::optimal) {
        j["objective"] = s.objective;
        json x = json::object();
        for (std::size_t k = 0; k < s.vars.size(); ++k) x[s.vars[k].name()] = s.x[k];
        j["x"] = x;
    }
    return j;
}

inline json to_json(const SimResult& r) {
    return {{"power_mean", r.power_mean}, {"delay_mean", r.delay_mean}, {"power_se", number(r.power_se)},
            {"delay_se", number(r.delay_se)}, {"slots_used", r.slots_used}};
}

inline std::string encode_actions(const std::vector<int>& a) {
    std::string s;
    for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "-" : "") + std::to_string(a[i]);
    return s;
}

inline json to_json(const PolicyCloud& c) {
    json pts = json::array();
    for (const auto& p : c.points) {
        pts.push_back({{"power", p.point.power}, {"delay", p.point.delay}, {"policy", encode_actions(p.actions)},
                       {"class_index", p.class_index}});
    }
    return {{"points", pts}, {"multichain_policies", c.multichain_policies}};
}

/// power,delay,slope; slope is that of the segment towards lower power, empty on the last vertex.
inline std::string curve_csv(const TradeoffCurve& c) {
    std::ostringstream os;
    os << "power,delay,slope\n";
    for (std::size_t i = 0; i < c.vertices.size(); ++i) {
        os << csv_number(c.vertices[i].point.power) << ',' << csv_number(c.vertices[i].point.delay) << ',';
        if (i < c.segments.size()) os << csv_number(c.segments[i].slope);
        os << '\n';
    }
    return os.str();
}

/// power,delay,policy with the policy written as s(0)-s(1)-...-s(Q).
inline std::string cloud_csv(const PolicyCloud& c) {
    std::ostringstream os;
    os << "power,delay,policy\n";
    for (const auto& p : c.points) {
        os << csv_number(p.point.power) << ',' << csv_number(p.point.delay) << ',' << encode_actions(p.actions) << '\n';
    }
    return os.str();
}

/// Dense Lambda, row i = destination state, column j = source state.
inline std::string transition_csv(const TransitionMatrix& t) {
    std::ostringstream os;
    for (int i = 0; i < t.states(); ++i) {
        for (int j = 0; j < t.states(); ++j) os << (j ? "," : "") << csv_number(t.lambda(i, j));
        os << '\n';
    }
    return os.str();
}

} // namespace io
} // namespace tradeoff
