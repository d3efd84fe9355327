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

// Optimal delay-power tradeoff by walking the vertices of the lower-left
// boundary, starting from "send as much as possible" and raising one threshold
// at a time.
//
// Adjacent vertices are realized by deterministic threshold policies that
// differ in a single threshold by one, so each step only probes the A - 1
// neighbours q_F(s*) + 1, 0 < s* < A, of every policy at the current vertex and
// keeps the candidate with the flattest descent (closest one on ties).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "tradeoff/chain.hpp"
#include "tradeoff/errors.hpp"
#include "tradeoff/model.hpp"

namespace tradeoff {

struct CurveVertex {
    PerfPoint point;
    std::vector<std::vector<int>> policies; ///< threshold vectors reaching this point
};

/// How to move along the segment between vertex `upper` (more power) and
/// `upper + 1`: the lower-power policy raises q_F(s_star) by one, so the two
/// differ only in state `state` = lower_thresholds[s_star].
struct CurveSegment {
    std::vector<int> upper_thresholds;
    std::vector<int> lower_thresholds;
    int s_star = 0;
    int state = 0;
    double slope = 0.0; ///< delay per unit power, negative
};

struct CurveStats {
    int iterations = 0;            ///< vertex advances
    int candidate_evaluations = 0; ///< feasible neighbours examined
    int stationary_solves = 0;     ///< distinct policies evaluated
};

/// Vertices ordered from the highest-power, lowest-delay end to the
/// lowest-power, highest-delay end. segments[i] joins vertices i and i + 1.
struct TradeoffCurve {
    std::vector<CurveVertex> vertices;
    std::vector<CurveSegment> segments;
    CurveStats stats;
};

namespace detail {

inline std::vector<int> transmit_max_thresholds(const ModelParams& params) {
    std::vector<int> t(params.actions());
    for (int s = 0; s < params.actions(); ++s) t[s] = s < params.batch ? s : params.buffer;
    return t;
}

} // namespace detail

/// Walk vertices closer than the point tolerance are merged; the walk itself
/// orders steps by their exact directions, so steps far below roundoff still
/// come out in slope order.
inline TradeoffCurve build_curve(const ModelParams& params) {
    const double p_noise = kNoiseRel * params.power_scale();
    const auto pcmp = params.power_compare();
    TradeoffCurve walk;
    auto& stats = walk.stats;

    struct Candidate {
        std::vector<int> thresholds;
        std::vector<int> parent;
        int s_star;
    };

    const auto start = detail::transmit_max_thresholds(params);
    std::vector<std::vector<int>> current{start};
    ++stats.stationary_solves;
    PerfPoint cur_point = evaluate(params, Policy::deterministic(params, threshold_actions(params, start)));

    while (true) {
        const double d_noise = kNoiseRel * std::max(1.0, cur_point.delay);
        // Neighbours with a zero direction share the vertex and are probed too.
        std::vector<std::vector<int>> at_vertex = current;
        std::vector<Candidate> best;
        double best_slope = std::numeric_limits<double>::infinity();
        PerfPoint best_dir{}, best_shift{};

        for (std::size_t i = 0; i < at_vertex.size(); ++i) {
            const auto parent = at_vertex[i];
            std::optional<FactoredChain> chain;
            for (int s_star = 1; s_star < params.batch; ++s_star) {
                auto cand = parent;
                ++cand[s_star];
                if (!thresholds_feasible(params, cand)) continue;
                if (!chain) {
                    chain.emplace(params, Policy::deterministic(params, threshold_actions(params, parent)));
                    ++stats.stationary_solves;
                }
                ++stats.candidate_evaluations;
                const auto fc = Policy::deterministic(params, threshold_actions(params, cand));
                const PerfPoint g = chain->direction(fc);

                if (std::abs(g.power) <= p_noise && std::abs(g.delay) <= d_noise) {
                    if (std::find(at_vertex.begin(), at_vertex.end(), cand) == at_vertex.end()) {
                        at_vertex.push_back(cand);
                    }
                    continue;
                }
                if (!(g.power < -p_noise) || g.delay < -d_noise) continue;

                const double slope = g.delay / -g.power;
                const PerfPoint dz = chain->shift(fc);
                const bool tie = std::isfinite(best_slope) && approx_equal(slope, best_slope);
                if (tie) {
                    if (pcmp.equal(dz.power, best_shift.power) && approx_equal(dz.delay, best_shift.delay, kRelTol, d_noise)) {
                        bool dup = false;
                        for (const auto& b : best) dup = dup || b.thresholds == cand;
                        if (!dup) best.push_back({cand, parent, s_star});
                    } else if (dz.power > best_shift.power) {
                        best = {{cand, parent, s_star}};
                        best_slope = slope;
                        best_dir = g;
                        best_shift = dz;
                    }
                } else if (slope < best_slope) {
                    best = {{cand, parent, s_star}};
                    best_slope = slope;
                    best_dir = g;
                    best_shift = dz;
                }
            }
        }

        walk.vertices.push_back({cur_point, at_vertex});
        if (best.empty()) break;

        ++stats.iterations;
        const auto& lead = best.front();
        walk.segments.push_back(
            {lead.parent, lead.thresholds, lead.s_star, lead.thresholds[lead.s_star], best_dir.delay / best_dir.power});
        current.clear();
        for (const auto& b : best) current.push_back(b.thresholds);
        cur_point = {cur_point.power + best_shift.power, cur_point.delay + best_shift.delay};
    }

    TradeoffCurve curve;
    curve.stats = stats;
    curve.vertices.push_back(walk.vertices.front());
    for (std::size_t k = 0; k < walk.segments.size(); ++k) {
        const auto& next = walk.vertices[k + 1];
        auto& last = curve.vertices.back();
        const bool same = pcmp.equal(next.point.power, last.point.power) && approx_equal(next.point.delay, last.point.delay);
        if (same) {
            for (const auto& t : next.policies) {
                if (std::find(last.policies.begin(), last.policies.end(), t) == last.policies.end()) last.policies.push_back(t);
            }
            continue;
        }
        curve.segments.push_back(walk.segments[k]);
        curve.vertices.push_back(next);
    }
    return curve;
}

/// Counters from a full curve construction.
inline CurveStats complexity_probe(const ModelParams& params) { return build_curve(params).stats; }

struct MinDelayResult {
    double delay = 0.0;
    ThresholdPolicy policy;
};

/// Smallest average delay with average power at most `budget`, and a policy
/// achieving it. Between vertices the policy mixes the two adjacent vertex
/// policies at their single differing state; the mixing probability is found
/// by bisection to |P(p) - budget| < 1e-10 budget (at most 200 halvings).
inline MinDelayResult min_delay(const TradeoffCurve& curve, const ModelParams& params, double budget) {
    if (curve.vertices.empty()) throw Error("empty curve");
    const double p_noise = kNoiseRel * params.power_scale();
    const auto& top = curve.vertices.front();
    const auto& bottom = curve.vertices.back();

    auto vertex_result = [](const CurveVertex& v) {
        return MinDelayResult{v.point.delay, ThresholdPolicy{v.policies.front(), std::nullopt}};
    };

    if (budget >= top.point.power - p_noise) return vertex_result(top);
    if (budget < bottom.point.power - p_noise) {
        throw InfeasibleBudgetError("power budget below the minimum achievable average power");
    }
    for (const auto& v : curve.vertices) {
        if (std::abs(budget - v.point.power) <= p_noise) return vertex_result(v);
    }

    std::size_t seg = 0;
    while (seg + 1 < curve.vertices.size() && budget < curve.vertices[seg + 1].point.power) ++seg;
    const auto& hi = curve.vertices[seg].point;
    const auto& recipe = curve.segments[seg];
    const double delay = hi.delay + (budget - hi.power) * recipe.slope;

    // p = 0 reproduces the upper vertex, p = 1 the lower one.
    ThresholdPolicy mixed{recipe.lower_thresholds, ThresholdPolicy::Mixing{recipe.s_star, 0.5}};
    auto power_at = [&](double p) {
        mixed.mixing->p = p;
        return evaluate(params, mixed_from_thresholds(params, mixed)).power;
    };
    // Relative, so it also bites for joule-scale budgets.
    const double tol = 1e-10 * budget;
    double a = 0.0, b = 1.0, p = 0.5;
    for (int it = 0; it < 200; ++it) {
        p = 0.5 * (a + b);
        const double pw = power_at(p);
        if (std::abs(pw - budget) < tol) break;
        if (pw > budget) {
            a = p;
        } else {
            b = p;
        }
    }
    mixed.mixing->p = p;
    return {delay, mixed};
}

} // namespace tradeoff
