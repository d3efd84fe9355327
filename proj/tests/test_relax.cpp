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

#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "support.hpp"
#include "tradeoff/oracle.hpp"
#include "tradeoff/relax.hpp"

namespace tradeoff {
namespace {

using testing::small4;

double brute_force_cost(const ModelParams& p, const PolicyCloud& cloud, double eta) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cloud.points) best = std::min(best, p.alpha * p.batch * c.point.delay + eta * c.point.power);
    return best;
}

void expect_threshold_shape(const std::vector<int>& s) {
    for (std::size_t q = 0; q + 1 < s.size(); ++q) {
        const int d = s[q + 1] - s[q];
        EXPECT_TRUE(d == 0 || d == 1) << "step " << d << " at q=" << q;
    }
}

TEST(PolicyIteration, SmallInstanceSelectsMiddleVertexForInteriorEta) {
    const auto p = small4();
    for (double eta : {2.5, 3.0, 4.0, 5.0, 5.9}) {
        const auto sol = policy_iteration(p, eta);
        const auto z = evaluate(p, sol.policy);
        EXPECT_NEAR(z.power, 1.25, 1e-12) << eta;
        EXPECT_NEAR(z.delay, 1.5, 1e-12) << eta;
        EXPECT_EQ(sol.s_of_q, (std::vector<int>{0, 1, 1, 2, 2}));
    }
    EXPECT_NEAR(evaluate(p, policy_iteration(p, 0.5).policy).delay, 1.0, 1e-12);
    EXPECT_NEAR(evaluate(p, policy_iteration(p, 10.0).policy).delay, 2.0, 1e-12);
}

TEST(PolicyIteration, MatchesEnumerationOnRandomInstances) {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 40; ++i) {
        const auto p = testing::random_instance(rng, 7);
        const auto cloud = build_cloud(p);
        for (double eta : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
            const auto sol = policy_iteration(p, eta);
            EXPECT_NEAR(sol.avg_cost, brute_force_cost(p, cloud, eta), 1e-9);
            const auto z = evaluate(p, sol.policy);
            EXPECT_NEAR(sol.avg_cost, p.alpha * p.batch * z.delay + eta * z.power, 1e-9);
            expect_threshold_shape(sol.s_of_q);
            EXPECT_TRUE(is_threshold_form(p, sol.policy));
            EXPECT_EQ(sol.bias[0], 0.0);
        }
    }
}

TEST(PolicyIteration, BiasIsStrictlyConvexForPositiveEta) {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 60; ++i) {
        const auto p = testing::random_instance(rng);
        for (double eta : {0.3, 1.0, 4.0, 10.0}) {
            const auto sol = policy_iteration(p, eta);
            for (int q = 1; q + 1 < p.states(); ++q) {
                const double d0 = sol.bias[q] - sol.bias[q - 1];
                const double d1 = sol.bias[q + 1] - sol.bias[q];
                EXPECT_GT(d1, d0 + 1e-9) << "q=" << q << " eta=" << eta;
            }
        }
    }
}

TEST(PolicyIteration, BiasIsWeaklyConvexAtZeroEta) {
    std::mt19937_64 rng(37);
    for (int i = 0; i < 60; ++i) {
        const auto p = testing::random_instance(rng);
        const auto sol = policy_iteration(p, 0.0);
        for (int q = 1; q + 1 < p.states(); ++q) {
            EXPECT_GE(sol.bias[q + 1] - 2.0 * sol.bias[q] + sol.bias[q - 1], -1e-9) << "q=" << q;
        }
    }
}

TEST(PolicyIteration, SingleBackupModeReachesTheSameCost) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 40; ++i) {
        const auto p = testing::random_instance(rng, 7);
        const auto cloud = build_cloud(p);
        for (double eta : {0.1, 1.0, 5.0}) {
            RelaxOptions opts;
            opts.mode = EvalMode::single_backup;
            opts.max_iter = 100000;
            const auto sol = policy_iteration(p, eta, opts);
            expect_threshold_shape(sol.s_of_q);
            EXPECT_GE(sol.avg_cost, brute_force_cost(p, cloud, eta) - 1e-9);
        }
    }
}

TEST(PolicyIteration, Errors) {
    EXPECT_THROW(policy_iteration(small4(), -1.0), ValidationError);
    EXPECT_THROW(sweep_eta(small4(), {}), ValidationError);
    RelaxOptions opts;
    opts.max_iter = 1;
    EXPECT_THROW(policy_iteration(presets::fig4(), 1.0, opts), NoConvergenceError);
    EXPECT_EQ(sweep_eta(small4(), {1.0, 3.0}).size(), 2u);
}

} // namespace
} // namespace tradeoff
