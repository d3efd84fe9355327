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

// System parameters and scheduling policies for a single finite buffer fed by
// Bernoulli batch arrivals and drained by a transmitter with convex power cost.
//
// Queue dynamics per slot: q' = q - s + A * a, a ~ Bernoulli(alpha). A policy
// may only pick s with 0 <= q - s <= Q - A, so the buffer never under- or
// overflows whatever the arrival.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tradeoff/errors.hpp"
#include "tradeoff/numeric.hpp"

namespace tradeoff {

struct ModelParams {
    double alpha = 0.5;        ///< arrival probability per slot
    int batch = 1;             ///< packets per arrival (A)
    int max_tx = 1;            ///< packets per slot the transmitter can send (S)
    int buffer = 1;            ///< buffer capacity in packets (Q)
    std::vector<double> power; ///< power[s]: energy to send s packets, size S + 1

    int states() const { return buffer + 1; }
    int actions() const { return max_tx + 1; }

    /// Smallest and largest admissible action in state q.
    int min_action(int q) const { return std::max(0, q - (buffer - batch)); }
    int max_action(int q) const { return std::min(q, max_tx); }

    bool feasible(int q, int s) const {
        return s >= 0 && s <= max_tx && q - s >= 0 && q - s <= buffer - batch;
    }

    /// Unit used for power comparisons; the largest per-slot energy.
    double power_scale() const { return power.empty() || power.back() <= 0.0 ? 1.0 : power.back(); }

    ScaledCompare power_compare() const { return ScaledCompare{power_scale()}; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Checks the model assumptions and returns the parameters unchanged.
///
/// Requires 0 < alpha < 1, 1 <= A <= S, Q >= A, power of size S + 1 with
/// power[0] = 0 and strictly increasing, strictly convex increments. All power
/// comparisons are relative (1e-9) so joule-scale inputs validate correctly.
inline ModelParams validate_params(const ModelParams& raw) {
    if (!(raw.alpha > 0.0 && raw.alpha < 1.0)) {
        throw ValidationError(ValidationCode::BadRange, "alpha must lie in (0, 1)");
    }
    if (raw.batch < 1) throw ValidationError(ValidationCode::BadRange, "batch A must be >= 1");
    if (raw.max_tx < raw.batch) {
        throw ValidationError(ValidationCode::BadRange, "max_tx S must be >= batch A");
    }
    if (raw.buffer < raw.batch) {
        throw ValidationError(ValidationCode::BadRange, "buffer Q must be >= batch A");
    }
    if (raw.power.size() != static_cast<std::size_t>(raw.max_tx) + 1) {
        throw ValidationError(ValidationCode::BadRange, "power vector must have S + 1 entries");
    }
    for (double p : raw.power) {
        if (!std::isfinite(p)) throw ValidationError(ValidationCode::BadRange, "power must be finite");
    }
    double scale = 0.0;
    for (double p : raw.power) scale = std::max(scale, std::abs(p));
    if (scale == 0.0) scale = 1.0;
    if (std::abs(raw.power[0]) > kRelTol * scale) {
        throw ValidationError(ValidationCode::NonzeroBase, "power[0] must be 0");
    }
    double prev_diff = 0.0;
    for (int s = 1; s <= raw.max_tx; ++s) {
        double diff = (raw.power[s] - raw.power[s - 1]) / scale;
        if (s == 1 ? diff <= kRelTol : diff <= prev_diff + kRelTol) {
            throw ValidationError(ValidationCode::NonConvexPower,
                                  "power increments must be positive and strictly increasing (s = " +
                                      std::to_string(s) + ")");
        }
        prev_diff = diff;
    }
    ModelParams out = raw;
    out.power[0] = 0.0;
    return out;
}

/// Thresholds q_F(0..S) plus an optional two-action mix at state q_F(s_star).
struct ThresholdPolicy {
    struct Mixing {
        int s_star = 0;
        double p = 1.0; ///< probability of sending s_star at state q_F(s_star)
        friend bool operator==(const Mixing&, const Mixing&) = default;
    };

    std::vector<int> thresholds;
    std::optional<Mixing> mixing;

    friend bool operator==(const ThresholdPolicy&, const ThresholdPolicy&) = default;
};

struct PerfPoint {
    double power = 0.0;
    double delay = 0.0;
};

/// Stationary randomized policy: row q is the distribution of packets sent in
/// state q. Construction enforces row sums, [0, 1] entries and the zero pattern
/// that prevents under- and overflow.
class Policy {
public:
    Policy() = default;

    /// Builds from row-major nested rows, (Q + 1) x (S + 1).
    static Policy from_rows(const ModelParams& params, const std::vector<std::vector<double>>& rows) {
        if (rows.size() != static_cast<std::size_t>(params.states())) {
            throw ValidationError(ValidationCode::InvalidPolicy, "policy needs Q + 1 rows");
        }
        Policy f(params.states(), params.actions());
        for (int q = 0; q < f.rows_; ++q) {
            if (rows[q].size() != static_cast<std::size_t>(f.cols_)) {
                throw ValidationError(ValidationCode::InvalidPolicy, "policy rows need S + 1 entries");
            }
            for (int s = 0; s < f.cols_; ++s) f.at(q, s) = rows[q][s];
        }
        f.check(params);
        return f;
    }

    /// Deterministic policy sending actions[q] packets in state q.
    static Policy deterministic(const ModelParams& params, std::span<const int> actions) {
        if (actions.size() != static_cast<std::size_t>(params.states())) {
            throw ValidationError(ValidationCode::InvalidPolicy, "action vector needs Q + 1 entries");
        }
        Policy f(params.states(), params.actions());
        for (int q = 0; q < f.rows_; ++q) {
            int s = actions[q];
            if (!params.feasible(q, s)) {
                throw ValidationError(ValidationCode::InvalidPolicy,
                                      "action " + std::to_string(s) + " infeasible in state " + std::to_string(q));
            }
            f.at(q, s) = 1.0;
        }
        return f;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double operator()(int q, int s) const { return data_[static_cast<std::size_t>(q) * cols_ + s]; }
    std::span<const double> row(int q) const {
        return {data_.data() + static_cast<std::size_t>(q) * cols_, static_cast<std::size_t>(cols_)};
    }

    /// Expected energy in state q.
    double expected_power(const ModelParams& params, int q) const {
        double e = 0.0;
        for (int s = 0; s < cols_; ++s) e += params.power[s] * (*this)(q, s);
        return e;
    }

    bool is_deterministic() const {
        return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0 || v == 1.0; });
    }

    /// s(q) for a deterministic policy; empty otherwise.
    std::optional<std::vector<int>> actions() const {
        if (!is_deterministic()) return std::nullopt;
        std::vector<int> out(rows_);
        for (int q = 0; q < rows_; ++q) {
            for (int s = 0; s < cols_; ++s) {
                if ((*this)(q, s) == 1.0) out[q] = s;
            }
        }
        return out;
    }

    std::vector<std::vector<double>> to_rows() const {
        std::vector<std::vector<double>> out(rows_);
        for (int q = 0; q < rows_; ++q) out[q].assign(row(q).begin(), row(q).end());
        return out;
    }

    /// (1 - eps) * a + eps * b, entrywise. Shapes must agree.
    static Policy blend(const Policy& a, const Policy& b, double eps) {
        Policy out(a.rows_, a.cols_);
        for (std::size_t i = 0; i < out.data_.size(); ++i) {
            out.data_[i] = (1.0 - eps) * a.data_[i] + eps * b.data_[i];
        }
        // Exact endpoints keep deterministic inputs deterministic.
        if (eps == 0.0) return a;
        if (eps == 1.0) return b;
        return out;
    }

    friend bool operator==(const Policy&, const Policy&) = default;

private:
    Policy(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    double& at(int q, int s) { return data_[static_cast<std::size_t>(q) * cols_ + s]; }

    void check(const ModelParams& params) const {
        for (int q = 0; q < rows_; ++q) {
            double sum = 0.0;
            for (int s = 0; s < cols_; ++s) {
                double v = (*this)(q, s);
                if (!(v >= 0.0 && v <= 1.0)) {
                    throw ValidationError(ValidationCode::InvalidPolicy, "entries must lie in [0, 1]");
                }
                if (v != 0.0 && !params.feasible(q, s)) {
                    throw ValidationError(ValidationCode::InvalidPolicy,
                                          "nonzero entry at infeasible (q, s) = (" + std::to_string(q) + ", " +
                                              std::to_string(s) + ")");
                }
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-12) {
                throw ValidationError(ValidationCode::InvalidPolicy,
                                      "row " + std::to_string(q) + " does not sum to 1");
            }
        }
    }

    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// Rows in which two policies of equal shape differ.
inline std::vector<int> differing_rows(const Policy& a, const Policy& b) {
    std::vector<int> out;
    for (int q = 0; q < a.rows(); ++q) {
        auto ra = a.row(q);
        auto rb = b.row(q);
        if (!std::equal(ra.begin(), ra.end(), rb.begin())) out.push_back(q);
    }
    return out;
}

namespace detail {

inline void check_threshold_shape(const ModelParams& params, const std::vector<int>& t) {
    if (t.size() != static_cast<std::size_t>(params.actions())) {
        throw ValidationError(ValidationCode::InfeasibleThresholds, "need S + 1 thresholds");
    }
    for (std::size_t s = 0; s < t.size(); ++s) {
        if (t[s] < 0 || t[s] > params.buffer) {
            throw ValidationError(ValidationCode::InfeasibleThresholds, "thresholds must lie in [0, Q]");
        }
        if (s > 0 && t[s] < t[s - 1]) {
            throw ValidationError(ValidationCode::InfeasibleThresholds, "thresholds must be nondecreasing");
        }
    }
}

/// s(q) = smallest s with q <= q_F(s); -1 when no threshold covers q.
inline std::vector<int> actions_from_thresholds(const ModelParams& params, const std::vector<int>& t) {
    std::vector<int> actions(params.states(), -1);
    int s = 0;
    for (int q = 0; q < params.states(); ++q) {
        while (s < static_cast<int>(t.size()) && q > t[s]) ++s;
        actions[q] = s < static_cast<int>(t.size()) ? s : -1;
    }
    return actions;
}

inline void check_actions_feasible(const ModelParams& params, const std::vector<int>& actions) {
    for (int q = 0; q < params.states(); ++q) {
        if (actions[q] < 0) {
            throw ValidationError(ValidationCode::InfeasibleThresholds,
                                  "state " + std::to_string(q) + " lies above q_F(S)");
        }
        if (!params.feasible(q, actions[q])) {
            throw ValidationError(ValidationCode::InfeasibleThresholds,
                                  "state " + std::to_string(q) + " would send " + std::to_string(actions[q]) +
                                      " packets");
        }
    }
}

} // namespace detail

/// True when thresholds are monotone and every state gets a feasible action.
inline bool thresholds_feasible(const ModelParams& params, const std::vector<int>& t) {
    try {
        detail::check_threshold_shape(params, t);
        detail::check_actions_feasible(params, detail::actions_from_thresholds(params, t));
    } catch (const ValidationError&) {
        return false;
    }
    return true;
}

/// Packets sent per state under deterministic thresholds.
inline std::vector<int> threshold_actions(const ModelParams& params, const std::vector<int>& thresholds) {
    detail::check_threshold_shape(params, thresholds);
    auto actions = detail::actions_from_thresholds(params, thresholds);
    detail::check_actions_feasible(params, actions);
    return actions;
}

/// f(q, s) = 1 for q_F(s-1) < q <= q_F(s), with q_F(-1) = -1.
inline Policy deterministic_from_thresholds(const ModelParams& params, const ThresholdPolicy& t) {
    return Policy::deterministic(params, threshold_actions(params, t.thresholds));
}

/// Deterministic thresholds except at state q_F(s_star), which sends s_star
/// with probability p and s_star + 1 otherwise.
inline Policy mixed_from_thresholds(const ModelParams& params, const ThresholdPolicy& t) {
    if (!t.mixing) return deterministic_from_thresholds(params, t);
    const auto& mix = *t.mixing;
    if (!(mix.p >= 0.0 && mix.p <= 1.0)) {
        throw ValidationError(ValidationCode::InfeasibleThresholds, "mixing probability must lie in [0, 1]");
    }
    if (mix.s_star < 0 || mix.s_star >= params.max_tx) {
        throw ValidationError(ValidationCode::InfeasibleThresholds, "s_star must lie in [0, S)");
    }
    auto actions = threshold_actions(params, t.thresholds);
    const int q_mix = t.thresholds[mix.s_star];
    auto rows = Policy::deterministic(params, actions).to_rows();
    if (mix.p < 1.0) {
        if ((mix.p > 0.0 && !params.feasible(q_mix, mix.s_star)) || !params.feasible(q_mix, mix.s_star + 1)) {
            throw ValidationError(ValidationCode::InfeasibleThresholds,
                                  "state " + std::to_string(q_mix) + " cannot mix s_star and s_star + 1");
        }
        std::fill(rows[q_mix].begin(), rows[q_mix].end(), 0.0);
        rows[q_mix][mix.s_star] = mix.p;
        rows[q_mix][mix.s_star + 1] = 1.0 - mix.p;
    }
    return Policy::from_rows(params, rows);
}

/// Smallest nondecreasing thresholds with f(q, s) > 0 only when
/// q_F(s-1) <= q <= q_F(s); empty when no such vector exists.
inline std::optional<std::vector<int>> explain_thresholds(const ModelParams& params, const Policy& f) {
    const int n_act = params.actions();
    constexpr int kNone = -1;
    std::vector<int> first(n_act, kNone), last(n_act, kNone);
    for (int q = 0; q < params.states(); ++q) {
        for (int s = 0; s < n_act; ++s) {
            if (f(q, s) > 0.0) {
                if (first[s] == kNone) first[s] = q;
                last[s] = q;
            }
        }
    }
    std::vector<int> t(n_act);
    int running = 0;
    for (int s = 0; s < n_act; ++s) {
        running = std::max(running, last[s] == kNone ? 0 : last[s]);
        t[s] = running;
    }
    // Every state must be covered by the top threshold.
    t[n_act - 1] = params.buffer;
    for (int s = 0; s + 1 < n_act; ++s) {
        if (first[s + 1] != kNone && t[s] > first[s + 1]) return std::nullopt;
    }
    return t;
}

inline bool is_threshold_form(const ModelParams& params, const Policy& f) {
    return explain_thresholds(params, f).has_value();
}

namespace presets {

/// Small scenario: Q = 6, A = 3, S = 3, alpha = 0.4, P = (0, 1, 4, 9).
inline ModelParams fig4() { return validate_params({0.4, 3, 3, 6, {0.0, 1.0, 4.0, 9.0}}); }

/// Adaptive BPSK/QPSK/8-PSK link, energies in joules, Q = 100, A = S = 3.
inline ModelParams fig5(double alpha = 0.4) {
    return validate_params({alpha, 3, 3, 100, {0.0, 9.0e-14, 18.2e-14, 59.5e-14}});
}

inline std::optional<ModelParams> by_name(const std::string& name, std::optional<double> alpha = std::nullopt) {
    if (name == "fig4") {
        auto p = fig4();
        if (alpha) {
            p.alpha = *alpha;
            p = validate_params(p);
        }
        return p;
    }
    if (name == "fig5") return fig5(alpha.value_or(0.4));
    return std::nullopt;
}

} // namespace presets

} // namespace tradeoff
