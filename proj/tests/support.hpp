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

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tradeoff/model.hpp"

namespace tradeoff::testing {

/// Q = 4, A = 2, S = 2, alpha = 0.5, P = (0, 1, 3).
inline ModelParams small4() { return validate_params({0.5, 2, 2, 4, {0.0, 1.0, 3.0}}); }

/// Random instance with Q <= max_q, A <= S <= 3 and strictly convex power.
inline ModelParams random_instance(std::mt19937_64& rng, int max_q = 8) {
    std::uniform_int_distribution<int> pick_s(1, 3);
    const int S = pick_s(rng);
    const int A = std::uniform_int_distribution<int>(1, S)(rng);
    const int Q = std::uniform_int_distribution<int>(A, max_q)(rng);
    const double alpha = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    std::uniform_real_distribution<double> step(0.1, 2.0);
    std::vector<double> p{0.0};
    double inc = step(rng);
    for (int s = 1; s <= S; ++s) {
        p.push_back(p.back() + inc);
        inc += step(rng);
    }
    return validate_params({alpha, A, S, Q, p});
}

/// Uniformly random deterministic feasible action vector.
inline std::vector<int> random_actions(const ModelParams& params, std::mt19937_64& rng) {
    std::vector<int> a(params.states());
    for (int q = 0; q < params.states(); ++q) {
        a[q] = std::uniform_int_distribution<int>(params.min_action(q), params.max_action(q))(rng);
    }
    return a;
}

} // namespace tradeoff::testing
