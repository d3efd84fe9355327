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

// Dense two-phase tableau simplex with Bland's anti-cycling rule.
//
//     minimize c^T x   subject to   a_i^T x {<=, =, >=} b_i,   x >= 0.
//
// Meant for programs with a few hundred columns; every row is equilibrated by
// its largest coefficient before pivoting.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tradeoff/errors.hpp"

namespace tradeoff::simplex {

enum class Sense { le, eq, ge };
enum class Status { optimal, infeasible, unbounded };

inline const char* to_string(Status s) {
    switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    }
    return "unknown";
}

struct Constraint {
    std::vector<double> coeffs; ///< dense, one per structural variable
    Sense sense = Sense::le;
    double rhs = 0.0;
};

struct Problem {
    std::vector<double> cost;
    std::vector<Constraint> rows;
};

struct Result {
    Status status = Status::infeasible;
    std::vector<double> x;
    double objective = 0.0;
    int pivots = 0;
};

struct Options {
    double feasibility_tol = 1e-9;
    double cost_tol = 1e-9;
    double pivot_tol = 1e-10;
    int max_pivots = 200000;
};

namespace detail {

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : cols_(cols), data_(rows, std::vector<double>(cols + 1, 0.0)) {}

    std::size_t rows() const { return data_.size(); }
    std::size_t cols() const { return cols_; }
    double& at(std::size_t i, std::size_t j) { return data_[i][j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i][j]; }
    double& rhs(std::size_t i) { return data_[i][cols_]; }
    double rhs(std::size_t i) const { return data_[i][cols_]; }

    void pivot(std::size_t r, std::size_t c, std::vector<double>& cost_row) {
        auto& prow = data_[r];
        const double inv = 1.0 / prow[c];
        for (double& v : prow) v *= inv;
        prow[c] = 1.0;
        for (std::size_t i = 0; i < data_.size(); ++i) {
            if (i == r) continue;
            const double f = data_[i][c];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) data_[i][j] -= f * prow[j];
            data_[i][c] = 0.0;
        }
        const double f = cost_row[c];
        if (f != 0.0) {
            for (std::size_t j = 0; j <= cols_; ++j) cost_row[j] -= f * prow[j];
            cost_row[c] = 0.0;
        }
    }

    void erase_row(std::size_t r) { data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r)); }

private:
    std::size_t cols_;
    std::vector<std::vector<double>> data_;
};

} // namespace detail

/// Two-phase simplex. Throws NumericalFailure when the pivot cap is reached.
inline Result solve(const Problem& prob, const Options& opt = {}) {
    const std::size_t n = prob.cost.size();
    const std::size_t m = prob.rows.size();

    // Normalized rows with nonnegative right-hand sides.
    std::vector<Constraint> rows = prob.rows;
    for (auto& row : rows) {
        double scale = 0.0;
        for (double a : row.coeffs) scale = std::max(scale, std::abs(a));
        if (scale > 0.0) {
            for (double& a : row.coeffs) a /= scale;
            row.rhs /= scale;
        }
        if (row.rhs < 0.0) {
            for (double& a : row.coeffs) a = -a;
            row.rhs = -row.rhs;
            if (row.sense == Sense::le) {
                row.sense = Sense::ge;
            } else if (row.sense == Sense::ge) {
                row.sense = Sense::le;
            }
        }
    }

    // Columns: structural | slack/surplus | artificial.
    std::size_t n_slack = 0, n_art = 0;
    for (const auto& row : rows) {
        if (row.sense != Sense::eq) ++n_slack;
        if (row.sense != Sense::le) ++n_art;
    }
    const std::size_t art0 = n + n_slack;
    const std::size_t total = art0 + n_art;

    detail::Tableau tab(m, total);
    std::vector<std::size_t> basis(m);
    {
        std::size_t slack = n, art = art0;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = rows[i].coeffs[j];
            tab.rhs(i) = rows[i].rhs;
            switch (rows[i].sense) {
            case Sense::le:
                tab.at(i, slack) = 1.0;
                basis[i] = slack++;
                break;
            case Sense::ge:
                tab.at(i, slack++) = -1.0;
                tab.at(i, art) = 1.0;
                basis[i] = art++;
                break;
            case Sense::eq:
                tab.at(i, art) = 1.0;
                basis[i] = art++;
                break;
            }
        }
    }

    Result res;
    int& pivots = res.pivots;

    // Bland: lowest-index improving column, lowest-index leaving variable on ratio ties.
    auto run = [&](std::vector<double>& cost_row, std::size_t allowed_cols) -> bool {
        while (true) {
            std::size_t enter = allowed_cols;
            for (std::size_t j = 0; j < allowed_cols; ++j) {
                if (cost_row[j] < -opt.cost_tol) {
                    enter = j;
                    break;
                }
            }
            if (enter == allowed_cols) return true;
            std::size_t leave = tab.rows();
            double best_ratio = 0.0;
            for (std::size_t i = 0; i < tab.rows(); ++i) {
                const double a = tab.at(i, enter);
                if (a <= opt.pivot_tol) continue;
                const double ratio = std::max(0.0, tab.rhs(i)) / a;
                if (leave == tab.rows() || ratio < best_ratio - 1e-12 ||
                    (std::abs(ratio - best_ratio) <= 1e-12 && basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave == tab.rows()) return false;
            if (++pivots > opt.max_pivots) throw NumericalFailure("simplex pivot limit reached");
            tab.pivot(leave, enter, cost_row);
            basis[leave] = enter;
        }
    };

    // Phase 1: minimize the sum of artificials.
    if (n_art > 0) {
        std::vector<double> cost1(total + 1, 0.0);
        for (std::size_t j = art0; j < total; ++j) cost1[j] = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] >= art0) {
                for (std::size_t j = 0; j <= total; ++j) cost1[j] -= tab.at(i, j);
            }
        }
        run(cost1, total);
        if (-cost1[total] > opt.feasibility_tol) {
            res.status = Status::infeasible;
            return res;
        }
        // Drive remaining (zero-valued) artificials out; drop redundant rows.
        for (std::size_t i = 0; i < tab.rows();) {
            if (basis[i] < art0) {
                ++i;
                continue;
            }
            std::size_t col = art0;
            for (std::size_t j = 0; j < art0; ++j) {
                if (std::abs(tab.at(i, j)) > opt.pivot_tol) {
                    col = j;
                    break;
                }
            }
            if (col == art0) {
                tab.erase_row(i);
                basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(i));
                continue;
            }
            tab.pivot(i, col, cost1);
            basis[i] = col;
            ++i;
        }
    }

    // Phase 2 over structural and slack columns only.
    std::vector<double> cost2(total + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) cost2[j] = prob.cost[j];
    for (std::size_t i = 0; i < tab.rows(); ++i) {
        const double cb = basis[i] < n ? prob.cost[basis[i]] : 0.0;
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j <= total; ++j) cost2[j] -= cb * tab.at(i, j);
    }
    if (!run(cost2, art0)) {
        res.status = Status::unbounded;
        return res;
    }

    res.status = Status::optimal;
    res.x.assign(n, 0.0);
    for (std::size_t i = 0; i < tab.rows(); ++i) {
        if (basis[i] < n) res.x[basis[i]] = std::max(0.0, tab.rhs(i));
    }
    res.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) res.objective += prob.cost[j] * res.x[j];
    return res;
}

} // namespace tradeoff::simplex
