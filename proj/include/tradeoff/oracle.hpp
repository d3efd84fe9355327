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

// Brute-force reference: evaluate every deterministic feasible policy and take
// the Pareto part of the lower convex hull of the resulting points.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "tradeoff/chain.hpp"
#include "tradeoff/curve.hpp"
#include "tradeoff/errors.hpp"
#include "tradeoff/model.hpp"

namespace tradeoff {

inline constexpr double kDefaultPolicyCap = 1e6;

/// Number of deterministic feasible policies, as a double to survive overflow.
inline double policy_count(const ModelParams& params) {
    double n = 1.0;
    for (int q = 0; q < params.states(); ++q) n *= params.max_action(q) - params.min_action(q) + 1;
    return n;
}

/// Calls `fn(index, actions)` for every deterministic feasible policy in
/// lexicographic order of s(0..Q).
inline void enumerate_policies(const ModelParams& params, const std::function<void(std::int64_t, const std::vector<int>&)>& fn,
                               double cap = kDefaultPolicyCap) {
    const double count = policy_count(params);
    if (count > cap) {
        throw CountExceededError("policy count " + std::to_string(count) + " exceeds cap " + std::to_string(cap));
    }
    std::vector<int> s(params.states());
    for (int q = 0; q < params.states(); ++q) s[q] = params.min_action(q);
    for (std::int64_t idx = 0;; ++idx) {
        fn(idx, s);
        int q = params.states() - 1;
        while (q >= 0 && s[q] == params.max_action(q)) {
            s[q] = params.min_action(q);
            --q;
        }
        if (q < 0) return;
        ++s[q];
    }
}

struct CloudPoint {
    PerfPoint point;
    std::int64_t policy_id = 0;
    std::vector<int> actions;
    int class_index = -1; ///< closed class for multichain policies, -1 otherwise
};

struct PolicyCloud {
    std::vector<CloudPoint> points;
    std::vector<std::int64_t> multichain_policies;
};

namespace detail {

inline std::vector<CloudPoint> evaluate_policy(const ModelParams& params, std::int64_t id, const std::vector<int>& s) {
    const auto f = Policy::deterministic(params, s);
    const auto cc = closed_classes(transition_matrix(params, f));
    std::vector<CloudPoint> out;
    if (cc.classes.size() == 1) {
        out.push_back({evaluate(params, f), id, s, -1});
        return out;
    }
    for (std::size_t c = 0; c < cc.classes.size(); ++c) {
        const auto ss = stationary_on_class(params, f, cc.classes[c]);
        out.push_back({evaluate_steady(params, f, ss), id, s, static_cast<int>(c)});
    }
    return out;
}

inline unsigned default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

} // namespace detail

/// Evaluates every deterministic policy. Multichain policies contribute one
/// point per closed class and are listed in `multichain_policies`.
inline PolicyCloud build_cloud(const ModelParams& params, double cap = kDefaultPolicyCap, unsigned threads = 1) {
    std::vector<std::vector<int>> all;
    enumerate_policies(params, [&](std::int64_t, const std::vector<int>& s) { all.push_back(s); }, cap);

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(all.size())));
    std::vector<std::vector<CloudPoint>> results(all.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) results[i] = detail::evaluate_policy(params, static_cast<std::int64_t>(i), all[i]);
    };
    if (threads == 1) {
        work(0, all.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (all.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t b = t * chunk, e = std::min(all.size(), b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }

    PolicyCloud cloud;
    for (auto& r : results) {
        if (r.size() > 1 || (r.size() == 1 && r.front().class_index >= 0)) cloud.multichain_policies.push_back(r.front().policy_id);
        for (auto& p : r) cloud.points.push_back(std::move(p));
    }
    return cloud;
}

/// Lower-left boundary of the convex hull, ordered from high power to low.
inline std::vector<PerfPoint> lower_pareto_hull(const ModelParams& params, std::vector<PerfPoint> pts) {
    if (pts.empty()) return {};
    const double scale = params.power_scale();
    std::sort(pts.begin(), pts.end(), [](const PerfPoint& a, const PerfPoint& b) {
        return a.power < b.power || (a.power == b.power && a.delay < b.delay);
    });
    const auto pcmp = params.power_compare();
    std::vector<PerfPoint> uniq;
    for (const auto& p : pts) {
        if (!uniq.empty() && pcmp.equal(p.power, uniq.back().power)) {
            if (p.delay < uniq.back().delay) uniq.back() = p;
            continue;
        }
        uniq.push_back(p);
    }
    // Cross product in scaled power units; collinear middle points are dropped.
    auto cross = [&](const PerfPoint& o, const PerfPoint& a, const PerfPoint& b) {
        return ((a.power - o.power) / scale) * (b.delay - o.delay) - (a.delay - o.delay) * ((b.power - o.power) / scale);
    };
    std::vector<PerfPoint> hull;
    for (const auto& p : uniq) {
        while (hull.size() >= 2) {
            const auto& o = hull[hull.size() - 2];
            const auto& a = hull.back();
            const double c = cross(o, a, p);
            const double mag = std::max({1.0, std::abs(a.delay), std::abs(p.delay)});
            if (c <= 1e-12 * mag) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(p);
    }
    // Keep the strictly decreasing prefix.
    std::vector<PerfPoint> pareto{hull.front()};
    for (std::size_t i = 1; i < hull.size(); ++i) {
        if (hull[i].delay < pareto.back().delay && !approx_equal(hull[i].delay, pareto.back().delay)) {
            pareto.push_back(hull[i]);
        } else {
            break;
        }
    }
    std::reverse(pareto.begin(), pareto.end());
    return pareto;
}

/// Reference curve from full enumeration. Vertex policy lists hold the
/// threshold vectors of the threshold-form policies reaching each vertex.
inline TradeoffCurve reference_curve(const ModelParams& params, const PolicyCloud& cloud) {
    std::vector<PerfPoint> pts;
    pts.reserve(cloud.points.size());
    for (const auto& c : cloud.points) pts.push_back(c.point);
    const auto hull = lower_pareto_hull(params, pts);
    const auto pcmp = params.power_compare();

    TradeoffCurve curve;
    for (const auto& v : hull) {
        CurveVertex vertex{v, {}};
        for (const auto& c : cloud.points) {
            if (c.class_index >= 0) continue;
            if (!pcmp.equal(c.point.power, v.power) || !approx_equal(c.point.delay, v.delay)) continue;
            const auto f = Policy::deterministic(params, c.actions);
            if (auto t = explain_thresholds(params, f)) {
                if (std::find(vertex.policies.begin(), vertex.policies.end(), *t) == vertex.policies.end()) {
                    vertex.policies.push_back(*t);
                }
            }
        }
        std::sort(vertex.policies.begin(), vertex.policies.end());
        curve.vertices.push_back(std::move(vertex));
    }
    for (std::size_t i = 0; i + 1 < curve.vertices.size(); ++i) {
        const auto& hi = curve.vertices[i];
        const auto& lo = curve.vertices[i + 1];
        CurveSegment seg;
        seg.s_star = -1;
        seg.slope = (lo.point.delay - hi.point.delay) / (lo.point.power - hi.point.power);
        for (const auto& a : hi.policies) {
            for (const auto& b : lo.policies) {
                int diff = 0, where = -1;
                for (std::size_t s = 0; s < a.size(); ++s) {
                    if (a[s] != b[s]) {
                        ++diff;
                        where = static_cast<int>(s);
                    }
                }
                if (diff == 1 && b[where] == a[where] + 1 && seg.s_star < 0) {
                    seg.upper_thresholds = a;
                    seg.lower_thresholds = b;
                    seg.s_star = where;
                    seg.state = b[where];
                }
            }
        }
        curve.segments.push_back(std::move(seg));
    }
    curve.stats.stationary_solves = static_cast<int>(cloud.points.size());
    return curve;
}

inline TradeoffCurve reference_curve(const ModelParams& params, double cap = kDefaultPolicyCap, unsigned threads = 1) {
    return reference_curve(params, build_cloud(params, cap, threads));
}

} // namespace tradeoff
