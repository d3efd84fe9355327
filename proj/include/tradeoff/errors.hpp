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

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tradeoff {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ValidationCode {
    BadRange,
    NonzeroBase,
    NonConvexPower,
    InfeasibleThresholds,
    InvalidPolicy,
};

inline const char* to_string(ValidationCode code) {
    switch (code) {
    case ValidationCode::BadRange: return "BadRange";
    case ValidationCode::NonzeroBase: return "NonzeroBase";
    case ValidationCode::NonConvexPower: return "NonConvexPower";
    case ValidationCode::InfeasibleThresholds: return "InfeasibleThresholds";
    case ValidationCode::InvalidPolicy: return "InvalidPolicy";
    }
    return "Unknown";
}

/// Rejected model parameters, thresholds or policy matrices.
class ValidationError : public Error {
public:
    ValidationError(ValidationCode code, const std::string& what)
        : Error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ValidationCode code() const noexcept { return code_; }

private:
    ValidationCode code_;
};

/// The policy induces several closed classes and state 0 is transient.
class MultiChainError : public Error {
public:
    explicit MultiChainError(std::vector<std::vector<int>> classes)
        : Error("MultiChain: policy has " + std::to_string(classes.size()) +
                " closed classes and state 0 is transient"),
          classes_(std::move(classes)) {}
    const std::vector<std::vector<int>>& classes() const noexcept { return classes_; }

private:
    std::vector<std::vector<int>> classes_;
};

class RowMismatchError : public Error {
public:
    using Error::Error;
};

class DegenerateSegmentError : public Error {
public:
    using Error::Error;
};

class NoConvergenceError : public Error {
public:
    using Error::Error;
};

class InfeasibleBudgetError : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

class CountExceededError : public Error {
public:
    using Error::Error;
};

enum class SimulationFault { OverflowViolated, UnderflowViolated };

class SimulationError : public Error {
public:
    SimulationError(SimulationFault fault, const std::string& what)
        : Error(what), fault_(fault) {}
    SimulationFault fault() const noexcept { return fault_; }

private:
    SimulationFault fault_;
};

} // namespace tradeoff
