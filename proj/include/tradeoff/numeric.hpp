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

#include <algorithm>
#include <cmath>

namespace tradeoff {

inline constexpr double kRelTol = 1e-9;
inline constexpr double kAbsFloor = 1e-12;
/// Exact one-row shifts smaller than this fraction of the scale count as zero.
inline constexpr double kNoiseRel = 1e-13;

/// |a - b| <= rel * max(|a|, |b|) + abs_floor
inline bool approx_equal(double a, double b, double rel = kRelTol, double abs_floor = kAbsFloor) {
    if (a == b) return true;
    if (!std::isfinite(a) || !std::isfinite(b)) return false;
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

/// Comparisons in a rescaled unit: values are divided by `scale` first, so the
/// absolute floor applies to dimensionless quantities (power in joules is ~1e-13).
struct ScaledCompare {
    double scale = 1.0;

    bool equal(double a, double b) const { return approx_equal(a / scale, b / scale); }
    bool less(double a, double b) const { return a < b && !equal(a, b); }
    bool less_equal(double a, double b) const { return a < b || equal(a, b); }
};

} // namespace tradeoff
