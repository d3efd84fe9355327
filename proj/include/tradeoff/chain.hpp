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

// Markov chain induced by a fixed policy: transition matrix, closed classes,
// stationary distribution and the resulting (power, delay) point.
//
// Conventions follow the column-stochastic layout: lambda(j, i) is the
// probability of moving from state i to state j. The balance system replaces
// the last row of (Lambda - I) with the normalization row and moves it to the
// top:
//
//     H = [ 1^T ; (Lambda - I)(0:Q-1, :) ],   c = e_0,   H * pi = c.
//
// H is invertible exactly when the chain has a single closed class.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "tradeoff/errors.hpp"
#include "tradeoff/model.hpp"

namespace tradeoff {

struct TransitionMatrix {
    Eigen::MatrixXd lambda; ///< lambda(to, from)

    int states() const { return static_cast<int>(lambda.cols()); }
    double prob(int from, int to) const { return lambda(to, from); }
};

inline TransitionMatrix transition_matrix(const ModelParams& params, const Policy& f) {
    const int n = params.states();
    TransitionMatrix t{Eigen::MatrixXd::Zero(n, n)};
    for (int q = 0; q < n; ++q) {
        for (int s = 0; s < params.actions(); ++s) {
            const double w = f(q, s);
            if (w == 0.0) continue;
            t.lambda(q - s, q) += (1.0 - params.alpha) * w;
            t.lambda(q - s + params.batch, q) += params.alpha * w;
        }
    }
    return t;
}

struct ClosedClasses {
    std::vector<std::vector<int>> classes; ///< sorted by smallest member
    std::vector<int> transient;

    /// Index of the class containing `state`, or -1 when it is transient.
    int class_of(int state) const {
        for (std::size_t l = 0; l < classes.size(); ++l) {
            if (std::binary_search(classes[l].begin(), classes[l].end(), state)) return static_cast<int>(l);
        }
        return -1;
    }
};

/// Strongly connected components of the support graph (Tarjan); those
/// without outgoing edges are the closed communication classes.
inline ClosedClasses closed_classes(const TransitionMatrix& t) {
    const int n = t.states();
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (t.prob(i, j) > 0.0) adj[i].push_back(j);
        }
    }

    std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
    std::vector<bool> on_stack(n, false);
    int counter = 0, n_comp = 0;
    std::function<void(int)> connect = [&](int v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (int w : adj[v]) {
            if (index[w] < 0) {
                connect(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            int w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = n_comp;
            } while (w != v);
            ++n_comp;
        }
    };
    for (int v = 0; v < n; ++v) {
        if (index[v] < 0) connect(v);
    }

    std::vector<bool> closed(n_comp, true);
    for (int i = 0; i < n; ++i) {
        for (int j : adj[i]) {
            if (comp[j] != comp[i]) closed[comp[i]] = false;
        }
    }
    std::vector<std::vector<int>> members(n_comp);
    for (int v = 0; v < n; ++v) members[comp[v]].push_back(v);

    ClosedClasses out;
    for (int c = 0; c < n_comp; ++c) {
        if (closed[c]) {
            out.classes.push_back(members[c]);
        } else {
            out.transient.insert(out.transient.end(), members[c].begin(), members[c].end());
        }
    }
    std::sort(out.classes.begin(), out.classes.end());
    std::sort(out.transient.begin(), out.transient.end());
    return out;
}

/// H_F for the full chain.
inline Eigen::MatrixXd balance_matrix(const TransitionMatrix& t) {
    const int n = t.states();
    Eigen::MatrixXd h(n, n);
    h.row(0).setOnes();
    Eigen::MatrixXd g = t.lambda - Eigen::MatrixXd::Identity(n, n);
    h.bottomRows(n - 1) = g.topRows(n - 1);
    return h;
}

inline Eigen::VectorXd balance_rhs(int n) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    c(0) = 1.0;
    return c;
}

struct SteadyState {
    std::vector<double> pi;
    std::vector<int> recurrent; ///< closed class carrying the mass
};

/// Stationary distribution restricted to one closed class; zero elsewhere.
inline SteadyState stationary_on_class(const ModelParams& params, const Policy& f, const std::vector<int>& cls) {
    const auto t = transition_matrix(params, f);
    const int m = static_cast<int>(cls.size());
    Eigen::MatrixXd sub(m, m);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) sub(a, b) = t.lambda(cls[a], cls[b]) - (a == b ? 1.0 : 0.0);
    }
    Eigen::MatrixXd h(m, m);
    h.row(0).setOnes();
    h.bottomRows(m - 1) = sub.topRows(m - 1);
    Eigen::VectorXd x = h.partialPivLu().solve(balance_rhs(m));

    SteadyState out{std::vector<double>(params.states(), 0.0), cls};
    for (int a = 0; a < m; ++a) out.pi[cls[a]] = std::max(0.0, x(a));
    return out;
}

/// Unichain: solve H_F pi = c by dense LU. Several closed classes with
/// state 0 recurrent: use state 0's class. Otherwise MultiChainError.
inline SteadyState stationary(const ModelParams& params, const Policy& f) {
    const auto t = transition_matrix(params, f);
    const auto cc = closed_classes(t);
    if (cc.classes.size() == 1) {
        const Eigen::VectorXd x = balance_matrix(t).partialPivLu().solve(balance_rhs(params.states()));
        SteadyState out{std::vector<double>(params.states(), 0.0), cc.classes.front()};
        for (int q : out.recurrent) out.pi[q] = std::max(0.0, x(q));
        return out;
    }
    const int home = cc.class_of(0);
    if (home < 0) throw MultiChainError(cc.classes);
    return stationary_on_class(params, f, cc.classes[home]);
}

inline PerfPoint evaluate_steady(const ModelParams& params, const Policy& f, const SteadyState& ss) {
    PerfPoint z;
    double queue = 0.0;
    for (int q = 0; q < params.states(); ++q) {
        if (ss.pi[q] == 0.0) continue;
        z.power += ss.pi[q] * f.expected_power(params, q);
        queue += q * ss.pi[q];
    }
    z.delay = queue / (params.alpha * params.batch);
    return z;
}

/// Average power and Little's-law delay of a policy.
inline PerfPoint evaluate(const ModelParams& params, const Policy& f) {
    return evaluate_steady(params, f, stationary(params, f));
}

struct BalanceResidual {
    double h_residual = 0.0;   ///< ||H_F pi - c||_inf
    double g_residual = 0.0;   ///< ||(Lambda - I) pi||_inf
    double sum_error = 0.0;    ///< |sum(pi) - 1|
};

inline BalanceResidual balance_residual(const ModelParams& params, const Policy& f, const SteadyState& ss) {
    const auto t = transition_matrix(params, f);
    const Eigen::VectorXd pi = Eigen::Map<const Eigen::VectorXd>(ss.pi.data(), static_cast<Eigen::Index>(ss.pi.size()));
    const int n = params.states();
    BalanceResidual r;
    r.h_residual = (balance_matrix(t) * pi - balance_rhs(n)).lpNorm<Eigen::Infinity>();
    r.g_residual = ((t.lambda - Eigen::MatrixXd::Identity(n, n)) * pi).lpNorm<Eigen::Infinity>();
    r.sum_error = std::abs(pi.sum() - 1.0);
    return r;
}

/// One LU factorization of H_F, reused to answer one-row perturbation queries:
/// the mixing map eps -> eps' and the slope of the segment to a neighbour.
///
/// For Fp differing from F only in row q, with delta the q-th column of
/// H_Fp - H_F and k = (H_F^{-1} delta)_q:
///
///     eps' = eps (1 + k) / (1 + eps k)
///     slope = d^T H_F^{-1} delta / (alpha A (p_F^T H_F^{-1} delta - zeta_q))
///
/// where zeta_q is the change in expected energy at state q.
class FactoredChain {
public:
    FactoredChain(const ModelParams& params, Policy f) : params_(params), f_(std::move(f)) {
        const auto t = transition_matrix(params_, f_);
        const auto cc = closed_classes(t);
        if (cc.classes.size() != 1) throw MultiChainError(cc.classes);
        lambda_ = t.lambda;
        lu_ = balance_matrix(t).partialPivLu();
        pi_ = lu_.solve(balance_rhs(params_.states()));
        for (int q : cc.transient) pi_(q) = 0.0;
        p_ = Eigen::VectorXd(params_.states());
        d_ = Eigen::VectorXd(params_.states());
        for (int q = 0; q < params_.states(); ++q) {
            p_(q) = f_.expected_power(params_, q);
            d_(q) = q;
        }
    }

    const Policy& policy() const { return f_; }

    PerfPoint point() const { return {p_.dot(pi_), d_.dot(pi_) / (params_.alpha * params_.batch)}; }

    /// Fraction along [Z_F, Z_Fp] reached by the policy (1 - eps) F + eps Fp.
    double mix_scalar(const Policy& fp, double eps) const {
        const auto rows = differing_rows(f_, fp);
        if (rows.size() != 1) {
            throw RowMismatchError("policies differ in " + std::to_string(rows.size()) + " rows, expected 1");
        }
        if (eps == 0.0) return 0.0;
        if (eps == 1.0) return 1.0;
        const double k = perturbation(fp, rows.front()).gain;
        const double denom = 1.0 + eps * k;
        if (!(std::abs(denom) > 1e-14)) throw NumericalFailure("singular one-row perturbation");
        return eps * (1.0 + k) / denom;
    }

    /// Direction g of the move to fp, which differs from F in row q:
    /// Z_Fp - Z_F = pi_Fp(q) g with g = (zeta - p.x, -d.x / (alpha A)).
    /// g does not depend on pi, so its sign and slope stay exact even when
    /// pi_F(q) is far below roundoff. Zero when q is transient under F.
    PerfPoint direction(const Policy& fp) const { return step(fp).dir; }

    /// (P_Fp - P_F, D_Fp - D_F) without subtracting two evaluations.
    PerfPoint shift(const Policy& fp) const {
        const auto st = step(fp);
        return {st.weight * st.dir.power, st.weight * st.dir.delay};
    }

    /// (D_Fp - D_F) / (P_Fp - P_F) from the factorization of H_F alone.
    double segment_slope(const Policy& fp) const {
        const auto rows = differing_rows(f_, fp);
        if (rows.empty()) throw DegenerateSegmentError("identical policies span no segment");
        const auto g = direction(fp);
        if (std::abs(g.power) <= kNoiseRel * params_.power_scale()) {
            throw DegenerateSegmentError("segment has no power extent");
        }
        return g.delay / g.power;
    }

private:
    struct Perturbation {
        Eigen::VectorXd x; ///< H_F^{-1} delta
        double gain;       ///< x(q)
    };

    struct Step {
        PerfPoint dir;
        double weight = 0.0; ///< pi_Fp(q) = pi_F(q) / (1 + k)
    };

    Step step(const Policy& fp) const {
        const auto rows = differing_rows(f_, fp);
        if (rows.empty()) return {};
        if (rows.size() != 1) {
            throw RowMismatchError("policies differ in " + std::to_string(rows.size()) + " rows, expected 1");
        }
        const int q = rows.front();
        if (pi_(q) == 0.0) return {};
        const auto pert = perturbation(fp, q);
        if (!(std::abs(1.0 + pert.gain) > 1e-14)) throw NumericalFailure("singular one-row perturbation");
        const double zeta = fp.expected_power(params_, q) - f_.expected_power(params_, q);
        return {{zeta - p_.dot(pert.x), -d_.dot(pert.x) / (params_.alpha * params_.batch)}, pi_(q) / (1.0 + pert.gain)};
    }

    Perturbation perturbation(const Policy& fp, int q) const {
        const int n = params_.states();
        // Column q of Lambda_Fp; the normalization row of H does not change.
        Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
        for (int s = 0; s < params_.actions(); ++s) {
            const double w = fp(q, s);
            if (w == 0.0) continue;
            col(q - s) += (1.0 - params_.alpha) * w;
            col(q - s + params_.batch) += params_.alpha * w;
        }
        Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
        for (int r = 1; r < n; ++r) delta(r) = col(r - 1) - lambda_(r - 1, q);
        Eigen::VectorXd x = lu_.solve(delta);
        const double gain = x(q);
        return {std::move(x), gain};
    }

    ModelParams params_;
    Policy f_;
    Eigen::MatrixXd lambda_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    Eigen::VectorXd pi_, p_, d_;
};

inline double mix_scalar(const ModelParams& params, const Policy& f, const Policy& fp, double eps) {
    return FactoredChain(params, f).mix_scalar(fp, eps);
}

inline double segment_slope(const ModelParams& params, const Policy& f, const Policy& fp) {
    return FactoredChain(params, f).segment_slope(fp);
}

} // namespace tradeoff
