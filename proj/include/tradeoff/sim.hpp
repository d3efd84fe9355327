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

// Monte Carlo estimate of average power and delay under a policy.
//
// Random stream: std::mt19937_64 seeded with `seed`; each draw u = (x >> 11) * 2^-53.
// Every slot takes exactly two draws, in order: the action (inverse CDF over
// the policy row), then the arrival (u < alpha). Standard errors come from
// 100 equal batches after warmup.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "tradeoff/errors.hpp"
#include "tradeoff/model.hpp"

namespace tradeoff {

struct SimConfig {
    std::uint64_t seed = 1;
    std::int64_t slots = 1000000;
    std::int64_t warmup = 1000;
    int q0 = 0;
    std::ostream* trajectory = nullptr; ///< CSV slot,q,s,arrival when set
};

struct SimResult {
    double power_mean = 0.0;
    double delay_mean = 0.0;
    double power_se = 0.0;
    double delay_se = 0.0;
    std::int64_t slots_used = 0;
};

inline constexpr int kSimBatches = 100;

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline SimResult simulate(const ModelParams& params, const Policy& f, const SimConfig& cfg) {
    if (!(cfg.warmup >= 0 && cfg.slots > cfg.warmup)) {
        throw ValidationError(ValidationCode::BadRange, "slots must exceed warmup and warmup must be nonnegative");
    }
    if (cfg.q0 < 0 || cfg.q0 > params.buffer) throw ValidationError(ValidationCode::BadRange, "q0 outside [0, Q]");
    if (f.rows() != params.states() || f.cols() != params.actions()) {
        throw ValidationError(ValidationCode::InvalidPolicy, "policy shape does not match the model");
    }

    std::mt19937_64 rng(cfg.seed);
    const std::int64_t used = cfg.slots - cfg.warmup;
    const int batches = static_cast<int>(std::min<std::int64_t>(kSimBatches, used));
    const std::int64_t batch_len = used / batches;

    std::vector<double> bp(batches, 0.0), bq(batches, 0.0);
    double sum_p = 0.0, sum_q = 0.0;
    if (cfg.trajectory) *cfg.trajectory << "slot,q,s,arrival\n";

    int q = cfg.q0;
    for (std::int64_t n = 0; n < cfg.slots; ++n) {
        const double ua = uniform01(rng);
        const double uarr = uniform01(rng);
        const auto row = f.row(q);
        int s = 0;
        double acc = row[0];
        while (ua >= acc && s + 1 < static_cast<int>(row.size())) acc += row[++s];
        // Guard against roundoff landing on a zero-probability tail entry.
        while (row[s] == 0.0 && s > 0) --s;
        const int arrival = uarr < params.alpha ? 1 : 0;

        if (cfg.trajectory) *cfg.trajectory << n << ',' << q << ',' << s << ',' << arrival << '\n';
        if (n >= cfg.warmup) {
            const std::int64_t k = n - cfg.warmup;
            sum_p += params.power[s];
            sum_q += q;
            const std::int64_t b = k / batch_len;
            if (b < batches) {
                bp[b] += params.power[s];
                bq[b] += q;
            }
        }

        const int next = q - s + params.batch * arrival;
        if (q - s < 0) {
            throw SimulationError(SimulationFault::UnderflowViolated, "queue underflow at slot " + std::to_string(n));
        }
        if (next > params.buffer) {
            throw SimulationError(SimulationFault::OverflowViolated, "buffer overflow at slot " + std::to_string(n));
        }
        q = next;
    }

    const double rate = params.alpha * params.batch;
    SimResult r;
    r.slots_used = used;
    r.power_mean = sum_p / static_cast<double>(used);
    r.delay_mean = sum_q / static_cast<double>(used) / rate;
    if (batches < 2) {
        r.power_se = r.delay_se = std::numeric_limits<double>::infinity();
        return r;
    }
    auto se = [&](const std::vector<double>& sums, double scale) {
        double mean = 0.0;
        for (double v : sums) mean += v / static_cast<double>(batch_len) * scale;
        mean /= batches;
        double ss = 0.0;
        for (double v : sums) {
            const double d = v / static_cast<double>(batch_len) * scale - mean;
            ss += d * d;
        }
        return std::sqrt(ss / (batches - 1) / batches);
    };
    r.power_se = se(bp, 1.0);
    r.delay_se = se(bq, 1.0 / rate);
    return r;
}

} // namespace tradeoff
