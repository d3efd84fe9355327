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

#include <random>

#include "support.hpp"
#include "tradeoff/chain.hpp"

namespace tradeoff {
namespace {

using testing::small4;

ModelParams tiny() { return validate_params({0.4, 1, 1, 1, {0.0, 1.0}}); }

/// Q = 7, A = 2, S = 3: states 0, 1 idle and every other state sends two packets.
std::pair<ModelParams, Policy> split_example() {
    const auto p = validate_params({0.5, 2, 3, 7, {0.0, 1.0, 3.0, 6.0}});
    return {p, Policy::deterministic(p, std::vector<int>{0, 0, 2, 2, 2, 2, 2, 2})};
}

TEST(TransitionMatrix, TinyInstance) {
    const auto p = tiny();
    const auto t = transition_matrix(p, Policy::deterministic(p, std::vector<int>{0, 1}));
    EXPECT_NEAR(t.lambda(0, 0), 0.6, 1e-15);
    EXPECT_NEAR(t.lambda(0, 1), 0.6, 1e-15);
    EXPECT_NEAR(t.lambda(1, 0), 0.4, 1e-15);
    EXPECT_NEAR(t.lambda(1, 1), 0.4, 1e-15);
}

TEST(TransitionMatrix, ColumnOfSplitExample) {
    const auto [p, f] = split_example();
    const auto t = transition_matrix(p, f);
    EXPECT_DOUBLE_EQ(t.prob(4, 2), 1.0 - p.alpha);
    EXPECT_DOUBLE_EQ(t.prob(4, 4), p.alpha);
    EXPECT_DOUBLE_EQ(t.lambda.col(4).sum(), 1.0);
}

TEST(TransitionMatrix, ColumnsStochasticWithSparseSupport) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const auto p = testing::random_instance(rng);
        const auto a = testing::random_actions(p, rng);
        const auto t = transition_matrix(p, Policy::deterministic(p, a));
        for (int q = 0; q < p.states(); ++q) {
            EXPECT_NEAR(t.lambda.col(q).sum(), 1.0, 1e-12);
            int nz = 0;
            for (int j = 0; j < p.states(); ++j) {
                EXPECT_GE(t.lambda(j, q), 0.0);
                if (t.lambda(j, q) != 0.0) {
                    ++nz;
                    EXPECT_TRUE(j == q - a[q] || j == q - a[q] + p.batch);
                }
            }
            EXPECT_LE(nz, 2 * p.actions());
        }
    }
}

TEST(ClosedClasses, SplitExample) {
    const auto [p, f] = split_example();
    const auto cc = closed_classes(transition_matrix(p, f));
    ASSERT_EQ(cc.classes.size(), 2u);
    EXPECT_EQ(cc.classes[0], (std::vector<int>{0, 2}));
    EXPECT_EQ(cc.classes[1], (std::vector<int>{1, 3}));
    EXPECT_EQ(cc.transient, (std::vector<int>{4, 5, 6, 7}));
    EXPECT_EQ(cc.class_of(3), 1);
    EXPECT_EQ(cc.class_of(5), -1);
}

TEST(ClosedClasses, TransmitMaxFig4IsUnichain) {
    const auto p = presets::fig4();
    const auto cc = closed_classes(transition_matrix(p, deterministic_from_thresholds(p, {{0, 1, 2, 6}, std::nullopt})));
    EXPECT_EQ(cc.classes.size(), 1u);
}

TEST(ClosedClasses, SingleCycle) {
    const auto p = tiny();
    const auto cc = closed_classes(transition_matrix(p, Policy::deterministic(p, std::vector<int>{0, 1})));
    ASSERT_EQ(cc.classes.size(), 1u);
    EXPECT_EQ(cc.classes[0], (std::vector<int>{0, 1}));
    EXPECT_TRUE(cc.transient.empty());
}

TEST(Stationary, Examples) {
    const auto p = tiny();
    const auto ss = stationary(p, Policy::deterministic(p, std::vector<int>{0, 1}));
    EXPECT_NEAR(ss.pi[0], 0.6, 1e-12);
    EXPECT_NEAR(ss.pi[1], 0.4, 1e-12);

    const auto p2 = validate_params({0.5, 2, 2, 2, {0.0, 1.0, 3.0}});
    const auto ss2 = stationary(p2, Policy::deterministic(p2, std::vector<int>{0, 1, 2}));
    EXPECT_NEAR(ss2.pi[0], 0.5, 1e-12);
    EXPECT_EQ(ss2.pi[1], 0.0);
    EXPECT_NEAR(ss2.pi[2], 0.5, 1e-12);
}

TEST(Stationary, SeveralClassesUseStateZerosClass) {
    const auto [p, f] = split_example();
    const auto ss = stationary(p, f);
    EXPECT_EQ(ss.recurrent, (std::vector<int>{0, 2}));
    EXPECT_NEAR(ss.pi[0] + ss.pi[2], 1.0, 1e-12);
    EXPECT_EQ(ss.pi[1], 0.0);
}

TEST(Stationary, MultiChainWhenStateZeroIsTransient) {
    // 0 -> {0, 2}, 2 -> {1, 3} and closed classes {1, 3}, {5, 7}.
    const auto p = validate_params({0.5, 2, 3, 7, {0.0, 1.0, 3.0, 6.0}});
    const auto f = Policy::deterministic(p, std::vector<int>{0, 0, 1, 2, 2, 0, 1, 2});
    try {
        stationary(p, f);
        FAIL() << "expected MultiChainError";
    } catch (const MultiChainError& e) {
        ASSERT_EQ(e.classes().size(), 2u);
        EXPECT_EQ(e.classes()[0], (std::vector<int>{1, 3}));
        EXPECT_EQ(e.classes()[1], (std::vector<int>{5, 7}));
    }
    EXPECT_THROW(evaluate(p, f), MultiChainError);
    const auto on = stationary_on_class(p, f, {5, 7});
    EXPECT_NEAR(on.pi[5], 0.5, 1e-12);
    EXPECT_NEAR(on.pi[7], 0.5, 1e-12);
    EXPECT_EQ(on.pi[0], 0.0);
}

TEST(Evaluate, Examples) {
    const auto p = tiny();
    const auto z = evaluate(p, Policy::deterministic(p, std::vector<int>{0, 1}));
    EXPECT_NEAR(z.power, 0.4, 1e-12);
    EXPECT_NEAR(z.delay, 1.0, 1e-12);

    const auto z4 = evaluate(small4(), Policy::deterministic(small4(), std::vector<int>{0, 1, 1, 1, 2}));
    EXPECT_NEAR(z4.power, 7.0 / 6.0, 1e-12);
    EXPECT_NEAR(z4.delay, 2.0, 1e-12);

    for (double alpha : {0.3, 0.4, 0.5}) {
        const auto p5 = presets::fig5(alpha);
        std::vector<int> t{0, 1, 2, p5.buffer};
        EXPECT_NEAR(evaluate(p5, deterministic_from_thresholds(p5, {t, std::nullopt})).delay, 1.0, 1e-9);
    }
}

TEST(Evaluate, DelayAtLeastOneAndResidualsSmall) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        const auto p = testing::random_instance(rng);
        const auto f = Policy::deterministic(p, testing::random_actions(p, rng));
        const auto t = transition_matrix(p, f);
        const auto cc = closed_classes(t);
        if (cc.classes.size() != 1) continue;
        const auto ss = stationary(p, f);
        const auto r = balance_residual(p, f, ss);
        EXPECT_LT(r.h_residual, 1e-9);
        EXPECT_LT(r.g_residual, 1e-9);
        EXPECT_LT(r.sum_error, 1e-10);
        const auto z = evaluate_steady(p, f, ss);
        EXPECT_GE(z.power, 0.0);
        EXPECT_GE(z.delay, 1.0 - 1e-12);
    }
}

TEST(OneRowMix, SlopeExamples) {
    const auto p = small4();
    const auto f0 = Policy::deterministic(p, std::vector<int>{0, 1, 1, 1, 2});
    const auto f1 = Policy::deterministic(p, std::vector<int>{0, 1, 1, 2, 2});
    const auto f2 = Policy::deterministic(p, std::vector<int>{0, 1, 2, 2, 2});
    EXPECT_NEAR(segment_slope(p, f1, f2), -2.0, 1e-12);
    EXPECT_NEAR(segment_slope(p, f0, f1), -6.0, 1e-12);
    EXPECT_THROW(segment_slope(p, f1, f1), DegenerateSegmentError);
    EXPECT_THROW(segment_slope(p, f0, f2), RowMismatchError);
    EXPECT_THROW(mix_scalar(p, f0, f2, 0.5), RowMismatchError);
    EXPECT_EQ(mix_scalar(p, f1, f2, 0.0), 0.0);
    EXPECT_EQ(mix_scalar(p, f1, f2, 1.0), 1.0);
}

TEST(OneRowMix, MixedPointLiesAtEpsPrime) {
    std::mt19937_64 rng(17);
    const auto p = presets::fig4();
    int checked = 0;
    while (checked < 100) {
        auto a = testing::random_actions(p, rng);
        auto b = a;
        const int q = std::uniform_int_distribution<int>(0, p.buffer)(rng);
        b[q] = std::uniform_int_distribution<int>(p.min_action(q), p.max_action(q))(rng);
        if (a == b) continue;
        const auto f = Policy::deterministic(p, a);
        const auto fp = Policy::deterministic(p, b);
        if (closed_classes(transition_matrix(p, f)).classes.size() != 1) continue;
        if (closed_classes(transition_matrix(p, fp)).classes.size() != 1) continue;
        const auto zf = evaluate(p, f), zp = evaluate(p, fp);
        const double e = mix_scalar(p, f, fp, 0.5);
        EXPECT_GE(e, 0.0);
        EXPECT_LE(e, 1.0);
        const auto zm = evaluate(p, Policy::blend(f, fp, 0.5));
        EXPECT_NEAR(zm.power, zf.power + e * (zp.power - zf.power), 1e-9);
        EXPECT_NEAR(zm.delay, zf.delay + e * (zp.delay - zf.delay), 1e-9);
        if (std::abs(zp.power - zf.power) > 1e-6) {
            const double fd = (zp.delay - zf.delay) / (zp.power - zf.power);
            EXPECT_NEAR(segment_slope(p, f, fp), fd, 1e-8 * std::max(1.0, std::abs(fd)));
        }
        ++checked;
    }
}

TEST(FactoredChain, ShiftMatchesTwoEvaluationsAlongDirection) {
    std::mt19937_64 rng(29);
    const auto p = presets::fig4();
    int checked = 0;
    while (checked < 100) {
        auto a = testing::random_actions(p, rng);
        auto b = a;
        const int q = std::uniform_int_distribution<int>(0, p.buffer)(rng);
        b[q] = std::uniform_int_distribution<int>(p.min_action(q), p.max_action(q))(rng);
        const auto f = Policy::deterministic(p, a);
        const auto fp = Policy::deterministic(p, b);
        if (closed_classes(transition_matrix(p, f)).classes.size() != 1) continue;
        if (closed_classes(transition_matrix(p, fp)).classes.size() != 1) continue;
        const FactoredChain chain(p, f);
        const auto dz = chain.shift(fp);
        const auto g = chain.direction(fp);
        const auto zf = evaluate(p, f), zp = evaluate(p, fp);
        EXPECT_NEAR(dz.power, zp.power - zf.power, 1e-12);
        EXPECT_NEAR(dz.delay, zp.delay - zf.delay, 1e-12);
        // The shift is a nonnegative multiple of the direction.
        EXPECT_GE(dz.power * g.power, -1e-24);
        EXPECT_GE(dz.delay * g.delay, -1e-24);
        EXPECT_NEAR(dz.power * g.delay, dz.delay * g.power, 1e-10 * std::max(1.0, std::abs(g.delay * g.power)));
        ++checked;
    }
}

TEST(FactoredChain, TransientRowHasZeroDirection) {
    std::mt19937_64 rng(31);
    const auto p = testing::small4();
    int checked = 0;
    for (int trial = 0; trial < 2000 && checked < 20; ++trial) {
        auto a = testing::random_actions(p, rng);
        const auto f = Policy::deterministic(p, a);
        const auto cc = closed_classes(transition_matrix(p, f));
        if (cc.classes.size() != 1) continue;
        for (int q : cc.transient) {
            if (p.min_action(q) == p.max_action(q)) continue;
            auto b = a;
            b[q] = a[q] == p.min_action(q) ? p.max_action(q) : p.min_action(q);
            const auto g = FactoredChain(p, f).direction(Policy::deterministic(p, b));
            EXPECT_EQ(g.power, 0.0);
            EXPECT_EQ(g.delay, 0.0);
            ++checked;
        }
    }
    EXPECT_GT(checked, 0);
}

} // namespace
} // namespace tradeoff
