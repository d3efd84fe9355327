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

// Average-cost policy iteration for the penalized problem
//
//     minimize  lim 1/N E sum_n ( q[n] + eta * P_{s[n]} ).
//
// The optimum is deterministic and its action s(q) climbs by 0 or 1 per state;
// the minimal average cost equals alpha A D_F + eta P_F of the optimal policy.

#pragma once

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tradeoff/chain.hpp"
#include "tradeoff/errors.hpp"
#include "tradeoff/model.hpp"

namespace tradeoff {

enum class EvalMode {
    exact_eval,    ///< solve for the bias of each iterate (default)
    single_backup, ///< one Bellman backup per iteration, as in the textbook loop
};

struct RelaxSolution {
    Policy policy;
    std::vector<int> s_of_q;
    std::vector<double> bias; ///< h(q), h(0) = 0
    double avg_cost = 0.0;
    double eta = 0.0;
    int iterations = 0;
};

struct RelaxOptions {
    EvalMode mode = EvalMode::exact_eval;
    std::optional<int> max_iter; ///< default 10 (Q + 1)(S + 1)
};

namespace detail {

/// Greedy action per state against bias h; smallest s among ties.
inline std::vector<int> improve(const ModelParams& params, double eta, const std::vector<double>& h) {
    std::vector<int> out(params.states());
    for (int q = 0; q < params.states(); ++q) {
        double best = std::numeric_limits<double>::infinity();
        int best_s = -1;
        for (int s = params.min_action(q); s <= params.max_action(q); ++s) {
            const double v = q + eta * params.power[s] + params.alpha * (h[q - s + params.batch] - h[params.batch]) +
                             (1.0 - params.alpha) * (h[q - s] - h[0]);
            if (best_s < 0 || (v < best && !approx_equal(v, best, 1e-12, 1e-12))) {
                best = v;
                best_s = s;
            }
        }
        out[q] = best_s;
    }
    return out;
}

/// Gain g and bias h (h(0) = 0) of a deterministic unichain policy:
/// h(q) + g = c(q) + sum_j lambda(q -> j) h(j).
inline std::pair<double, std::vector<double>> gain_bias(const ModelParams& params, double eta,
                                                       const std::vector<int>& actions) {
    const int n = params.states();
    // Unknowns: h(1..Q) in slots 0..Q-1, g in slot Q.
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs(n);
    for (int q = 0; q < n; ++q) {
        const int s = actions[q];
        rhs(q) = q + eta * params.power[s];
        if (q > 0) m(q, q - 1) += 1.0;
        const int down = q - s, up = q - s + params.batch;
        if (down > 0) m(q, down - 1) -= 1.0 - params.alpha;
        if (up > 0) m(q, up - 1) -= params.alpha;
        m(q, n - 1) = 1.0;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) throw NumericalFailure("policy iteration reached a multichain policy");
    const Eigen::VectorXd x = lu.solve(rhs);
    std::vector<double> h(n, 0.0);
    for (int q = 1; q < n; ++q) h[q] = x(q - 1);
    return {x(n - 1), h};
}

} // namespace detail

/// Policy iteration started from the strictly convex bias h(q) = q^2.
inline RelaxSolution policy_iteration(const ModelParams& params, double eta, RelaxOptions opts = {}) {
    if (!(eta >= 0.0)) throw ValidationError(ValidationCode::BadRange, "eta must be nonnegative");
    const int max_iter = opts.max_iter.value_or(10 * params.states() * params.actions());

    std::vector<double> h(params.states());
    for (int q = 0; q < params.states(); ++q) h[q] = static_cast<double>(q) * q;

    std::vector<int> current;
    for (int it = 1; it <= max_iter; ++it) {
        auto next = detail::improve(params, eta, h);
        if (opts.mode == EvalMode::exact_eval) {
            h = detail::gain_bias(params, eta, next).second;
        } else {
            std::vector<double> backed(params.states());
            for (int q = 0; q < params.states(); ++q) {
                const int s = next[q];
                backed[q] = q + eta * params.power[s] +
                            params.alpha * (h[q - s + params.batch] - h[params.batch]) +
                            (1.0 - params.alpha) * (h[q - s] - h[0]);
            }
            h = std::move(backed);
        }
        if (next == current) {
            RelaxSolution sol;
            sol.policy = Policy::deterministic(params, next);
            sol.s_of_q = next;
            sol.eta = eta;
            sol.iterations = it;
            const double h0 = h[0];
            for (double& v : h) v -= h0;
            sol.bias = std::move(h);
            if (opts.mode == EvalMode::exact_eval) {
                sol.avg_cost = detail::gain_bias(params, eta, next).first;
            } else {
                const auto z = evaluate(params, sol.policy);
                sol.avg_cost = params.alpha * params.batch * z.delay + eta * z.power;
            }
            return sol;
        }
        current = std::move(next);
    }
    throw NoConvergenceError("policy iteration did not stabilize within " + std::to_string(max_iter) +
                             " iterations");
}

inline std::vector<RelaxSolution> sweep_eta(const ModelParams& params, const std::vector<double>& etas,
                                            RelaxOptions opts = {}) {
    if (etas.empty()) throw ValidationError(ValidationCode::BadRange, "eta list is empty");
    std::vector<RelaxSolution> out;
    out.reserve(etas.size());
    for (double eta : etas) out.push_back(policy_iteration(params, eta, opts));
    return out;
}

} // namespace tradeoff
