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

// Minimum delay under a power budget as a linear program over the state-action
// frequencies x(q, s) = pi(q) f(q, s):
//
//     minimize    1/(alpha A) sum_q q sum_s x(q, s)
//     subject to  sum_{q,s} P_s x(q, s) <= P_th
//                 flow up across the cut (q-1 | q) = flow down, q = 1..Q
//                 sum_{q,s} x(q, s) = 1,  x >= 0,
//
// with x(q, s) fixed to zero (and omitted) outside 0 <= q - s <= Q - A.

#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tradeoff/chain.hpp"
#include "tradeoff/errors.hpp"
#include "tradeoff/model.hpp"
#include "tradeoff/simplex.hpp"

namespace tradeoff {

struct LpVariable {
    int q = 0;
    int s = 0;
    std::string name() const { return "x_" + std::to_string(q) + "_" + std::to_string(s); }
    friend bool operator==(const LpVariable&, const LpVariable&) = default;
};

struct LpRow {
    std::string name;
    std::vector<double> coeffs; ///< one per variable
    simplex::Sense sense = simplex::Sense::eq;
    double rhs = 0.0;
    friend bool operator==(const LpRow&, const LpRow&) = default;
};

struct LpProgram {
    std::vector<LpVariable> vars;
    std::vector<double> objective;
    std::vector<LpRow> rows; ///< power, balance_1..balance_Q, normalize
    friend bool operator==(const LpProgram&, const LpProgram&) = default;
};

using LpStatus = simplex::Status;

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<LpVariable> vars;
    std::vector<double> x;
    double objective = 0.0; ///< average delay when optimal
};

inline LpProgram build_lp(const ModelParams& params, double budget) {
    LpProgram prog;
    std::map<std::pair<int, int>, std::size_t> index;
    for (int q = 0; q < params.states(); ++q) {
        for (int s = params.min_action(q); s <= params.max_action(q); ++s) {
            index[{q, s}] = prog.vars.size();
            prog.vars.push_back({q, s});
            prog.objective.push_back(q / (params.alpha * params.batch));
        }
    }
    const std::size_t n = prog.vars.size();
    auto add = [&](std::vector<double>& row, int q, int s, double v) {
        auto it = index.find({q, s});
        if (it != index.end()) row[it->second] += v;
    };

    LpRow power{"power", std::vector<double>(n, 0.0), simplex::Sense::le, budget};
    for (std::size_t k = 0; k < n; ++k) power.coeffs[k] = params.power[prog.vars[k].s];
    prog.rows.push_back(std::move(power));

    const int Q = params.buffer, A = params.batch, S = params.max_tx;
    const double alpha = params.alpha;
    for (int q = 1; q <= Q; ++q) {
        LpRow row{"balance_" + std::to_string(q), std::vector<double>(n, 0.0), simplex::Sense::eq, 0.0};
        // Up-crossings: from l < q, an arrival lifts l - s + A to q or above.
        for (int l = std::max(0, q - A); l <= q - 1; ++l) {
            for (int s = 0; s <= std::min(S, l + A - q); ++s) add(row.coeffs, l, s, alpha);
        }
        // Down-crossings from r >= q.
        for (int r = q; r <= std::min(q + S - 1, Q); ++r) {
            for (int s = r - q + A + 1; s <= S; ++s) add(row.coeffs, r, s, -1.0);
            for (int s = r - q + 1; s <= std::min(S, r - q + A); ++s) add(row.coeffs, r, s, -(1.0 - alpha));
        }
        prog.rows.push_back(std::move(row));
    }

    prog.rows.push_back({"normalize", std::vector<double>(n, 1.0), simplex::Sense::eq, 1.0});
    return prog;
}

inline LpSolution solve_simplex(const LpProgram& prog) {
    simplex::Problem p;
    p.cost = prog.objective;
    for (const auto& row : prog.rows) p.rows.push_back({row.coeffs, row.sense, row.rhs});
    const auto r = simplex::solve(p);
    return {r.status, prog.vars, r.x, r.objective};
}

/// pi(q) = sum_s x(q, s); f(q, s) = x(q, s) / pi(q), or a unit row at
/// s = min(q, S) for states the solution never visits.
inline std::pair<Policy, SteadyState> recover_policy(const ModelParams& params, const LpSolution& sol) {
    if (sol.status != LpStatus::optimal) throw Error("cannot recover a policy from a non-optimal LP solution");
    constexpr double kZero = 1e-12;
    std::vector<std::vector<double>> rows(params.states(), std::vector<double>(params.actions(), 0.0));
    SteadyState ss{std::vector<double>(params.states(), 0.0), {}};
    for (std::size_t k = 0; k < sol.vars.size(); ++k) {
        const double v = std::max(0.0, sol.x[k]);
        rows[sol.vars[k].q][sol.vars[k].s] = v;
        ss.pi[sol.vars[k].q] += v;
    }
    for (int q = 0; q < params.states(); ++q) {
        if (ss.pi[q] > kZero) {
            for (double& v : rows[q]) v /= ss.pi[q];
            ss.recurrent.push_back(q);
        } else {
            ss.pi[q] = 0.0;
            std::fill(rows[q].begin(), rows[q].end(), 0.0);
            rows[q][std::min(q, params.max_tx)] = 1.0;
        }
    }
    // Renormalize away roundoff so row sums pass the 1e-12 check.
    for (auto& r : rows) {
        double sum = 0.0;
        for (double v : r) sum += v;
        for (double& v : r) v /= sum;
    }
    double total = 0.0;
    for (double v : ss.pi) total += v;
    for (double& v : ss.pi) v /= total;
    return {Policy::from_rows(params, rows), ss};
}

namespace detail {

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_terms(const std::vector<LpVariable>& vars, const std::vector<double>& coeffs) {
    std::string out;
    bool first = true;
    for (std::size_t k = 0; k < vars.size(); ++k) {
        const double c = coeffs[k];
        if (c == 0.0) continue;
        if (first) {
            out += (c < 0.0 ? "- " : "");
        } else {
            out += (c < 0.0 ? " - " : " + ");
        }
        out += format_number(std::abs(c)) + " " + vars[k].name();
        first = false;
    }
    return first ? "0 " + vars.front().name() : out;
}

} // namespace detail

/// CPLEX-LP text, one row per line; byte-stable for identical programs.
inline std::string export_lp_text(const LpProgram& prog) {
    std::ostringstream os;
    os << "\\ minimum average delay under an average power budget\n";
    os << "Minimize\n obj: " << detail::format_terms(prog.vars, prog.objective) << "\n";
    os << "Subject To\n";
    for (const auto& row : prog.rows) {
        const char* sense = row.sense == simplex::Sense::le ? "<=" : row.sense == simplex::Sense::ge ? ">=" : "=";
        os << " " << row.name << ": " << detail::format_terms(prog.vars, row.coeffs) << " " << sense << " "
           << detail::format_number(row.rhs) << "\n";
    }
    os << "Bounds\n";
    for (const auto& v : prog.vars) os << " " << v.name() << " >= 0\n";
    os << "End\n";
    return os.str();
}

/// Reads back the subset of CPLEX-LP written by export_lp_text.
inline LpProgram parse_lp_text(const std::string& text) {
    struct ParsedRow {
        std::string name;
        std::vector<std::pair<std::string, double>> terms;
        std::string sense;
        double rhs = 0.0;
    };
    auto parse_row = [](const std::string& line) {
        ParsedRow row;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw Error("LP parse: missing row name in '" + line + "'");
        std::istringstream name_is(line.substr(0, colon));
        name_is >> row.name;
        std::istringstream is(line.substr(colon + 1));
        std::string tok;
        double sign = 1.0;
        double coef = 1.0;
        bool have_coef = false;
        while (is >> tok) {
            if (tok == "+" || tok == "-") {
                sign = tok == "-" ? -1.0 : 1.0;
            } else if (tok == "<=" || tok == ">=" || tok == "=") {
                row.sense = tok;
                is >> row.rhs;
                break;
            } else if (tok.rfind("x_", 0) == 0) {
                row.terms.emplace_back(tok, sign * (have_coef ? coef : 1.0));
                sign = 1.0;
                have_coef = false;
            } else {
                coef = std::stod(tok);
                have_coef = true;
            }
        }
        return row;
    };

    std::istringstream in(text);
    std::string line, section;
    ParsedRow objective;
    std::vector<ParsedRow> rows;
    std::vector<std::string> order;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '\\') continue;
        if (line[0] != ' ') {
            section = line;
            continue;
        }
        if (section == "Minimize") {
            objective = parse_row(line);
        } else if (section == "Subject To") {
            rows.push_back(parse_row(line));
        } else if (section == "Bounds") {
            std::istringstream is(line);
            std::string name;
            is >> name;
            order.push_back(name);
        }
    }

    LpProgram prog;
    std::map<std::string, std::size_t> index;
    for (const auto& name : order) {
        int q = 0, s = 0;
        if (std::sscanf(name.c_str(), "x_%d_%d", &q, &s) != 2) throw Error("LP parse: bad variable " + name);
        index[name] = prog.vars.size();
        prog.vars.push_back({q, s});
    }
    auto dense = [&](const ParsedRow& r) {
        std::vector<double> c(prog.vars.size(), 0.0);
        for (const auto& [name, v] : r.terms) {
            auto it = index.find(name);
            if (it == index.end()) throw Error("LP parse: undeclared variable " + name);
            c[it->second] += v;
        }
        return c;
    };
    // A constant-zero objective is written as "0 x"; dense() keeps it zero.
    prog.objective = dense(objective);
    for (const auto& r : rows) {
        const auto sense = r.sense == "<=" ? simplex::Sense::le : r.sense == ">=" ? simplex::Sense::ge : simplex::Sense::eq;
        prog.rows.push_back({r.name, dense(r), sense, r.rhs});
    }
    return prog;
}

} // namespace tradeoff
