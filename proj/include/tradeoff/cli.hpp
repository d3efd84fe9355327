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

// Command-line front end. Every subcommand resolves a manifest (config file
// first, then flags), calls one library entry point and prints JSON or CSV
// carrying the manifest.
//
// Exit codes: 0 ok, 1 other error, 2 invalid input, 3 infeasible budget,
// 4 numerical failure.

#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tradeoff/chain.hpp"
#include "tradeoff/curve.hpp"
#include "tradeoff/errors.hpp"
#include "tradeoff/io.hpp"
#include "tradeoff/lp.hpp"
#include "tradeoff/model.hpp"
#include "tradeoff/oracle.hpp"
#include "tradeoff/relax.hpp"
#include "tradeoff/sim.hpp"

namespace tradeoff::cli {

enum ExitCode : int { kOk = 0, kError = 1, kInvalid = 2, kInfeasible = 3, kNumerical = 4 };

struct Flags {
    std::optional<std::string> config, preset, format, out;
    std::optional<double> alpha;
    std::optional<double> pth, eta;
    std::optional<std::string> mode, lp_export, cloud, policy, trajectory;
    std::optional<double> cap;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> slots, warmup;
    std::optional<int> q0;
};

inline unsigned thread_count() {
    if (const char* env = std::getenv("TRADEOFF_FORGE_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return 1;
}

namespace detail {

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(ValidationCode::BadRange, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError(ValidationCode::BadRange, path + ": " + e.what());
    }
}

template <typename T>
void merge(json& inputs, const char* key, const std::optional<T>& flag) {
    if (flag) inputs[key] = *flag;
}

/// Config values first, flags on top.
inline json resolve(const std::string& sub, const Flags& f) {
    json cfg = f.config ? read_json_file(*f.config) : json::object();
    if (!cfg.is_object()) throw ValidationError(ValidationCode::BadRange, "config must be a JSON object");
    json inputs = cfg.contains("inputs") ? cfg["inputs"] : json::object();
    merge(inputs, "pth", f.pth);
    merge(inputs, "eta", f.eta);
    merge(inputs, "mode", f.mode);
    merge(inputs, "export", f.lp_export);
    merge(inputs, "cloud", f.cloud);
    merge(inputs, "cap", f.cap);
    merge(inputs, "policy", f.policy);
    merge(inputs, "seed", f.seed);
    merge(inputs, "slots", f.slots);
    merge(inputs, "warmup", f.warmup);
    merge(inputs, "q0", f.q0);
    merge(inputs, "trajectory", f.trajectory);

    std::optional<std::string> preset = f.preset;
    if (!preset && cfg.contains("preset") && cfg["preset"].is_string()) preset = cfg["preset"].get<std::string>();
    std::optional<double> alpha = f.alpha;
    if (!alpha && cfg.contains("alpha") && cfg["alpha"].is_number()) alpha = cfg["alpha"].get<double>();

    ModelParams params;
    if (preset) {
        auto p = presets::by_name(*preset, alpha);
        if (!p) throw ValidationError(ValidationCode::BadRange, "unknown preset " + *preset);
        params = *p;
    } else if (cfg.contains("params")) {
        json pj = cfg["params"];
        if (alpha) pj["alpha"] = *alpha;
        params = io::params_from_json(pj);
    } else {
        throw ValidationError(ValidationCode::BadRange, "no model: give --preset or a config with params");
    }

    const std::string format = f.format.value_or(cfg.value("format", std::string("json")));
    if (format != "json" && format != "csv") throw ValidationError(ValidationCode::BadRange, "format must be json or csv");
    json m{{"subcommand", sub},
           {"preset", preset ? json(*preset) : json(nullptr)},
           {"params", io::to_json(params)},
           {"inputs", inputs},
           {"format", format}};
    const auto out = f.out ? std::optional<std::string>(f.out) : (cfg.contains("out") ? std::optional<std::string>(cfg["out"].get<std::string>()) : std::nullopt);
    m["out"] = out ? json(*out) : json(nullptr);
    return m;
}

inline ModelParams manifest_params(const json& m) { return io::params_from_json(m["params"]); }

template <typename T>
T required(const json& m, const char* key) {
    const auto& in = m["inputs"];
    if (!in.contains(key)) throw ValidationError(ValidationCode::BadRange, std::string("missing --") + key);
    return in[key].get<T>();
}

template <typename T>
T optional_input(const json& m, const char* key, T fallback) {
    const auto& in = m["inputs"];
    return in.contains(key) ? in[key].get<T>() : fallback;
}

inline std::string csv_with_manifest(const json& m, const std::string& body) {
    return "# manifest: " + m.dump() + "\n" + body;
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError(ValidationCode::BadRange, "cannot write " + path);
    os << text;
}

inline void emit(const json& m, const json& result, const std::string& csv, std::ostream& out) {
    std::string text;
    if (m["format"] == "csv") {
        text = csv_with_manifest(m, csv);
    } else {
        text = json{{"manifest", m}, {"result", result}}.dump(2) + "\n";
    }
    if (m["out"].is_string()) {
        write_file(m["out"].get<std::string>(), text);
    } else {
        out << text;
    }
}

inline int cmd_curve(const json& m, std::ostream& out) {
    const auto params = manifest_params(m);
    const auto curve = build_curve(params);
    emit(m, io::to_json(curve), io::curve_csv(curve), out);
    return kOk;
}

inline int cmd_query(const json& m, std::ostream& out) {
    const auto params = manifest_params(m);
    const double pth = required<double>(m, "pth");
    if (!(pth >= 0.0)) throw ValidationError(ValidationCode::BadRange, "pth must be nonnegative");
    const auto r = min_delay(build_curve(params), params, pth);
    std::string csv = "pth,delay\n" + io::csv_number(pth) + "," + io::csv_number(r.delay) + "\n";
    emit(m, io::to_json(r), csv, out);
    return kOk;
}

inline int cmd_relax(const json& m, std::ostream& out) {
    const auto params = manifest_params(m);
    const double eta = required<double>(m, "eta");
    const std::string mode = optional_input<std::string>(m, "mode", "exact");
    RelaxOptions opts;
    if (mode == "exact") {
        opts.mode = EvalMode::exact_eval;
    } else if (mode == "backup") {
        opts.mode = EvalMode::single_backup;
    } else {
        throw ValidationError(ValidationCode::BadRange, "mode must be exact or backup");
    }
    const auto sol = policy_iteration(params, eta, opts);
    const auto z = evaluate(params, sol.policy);
    json result = io::to_json(sol);
    result["point"] = io::to_json(z);
    std::ostringstream csv;
    csv << "q,s,bias\n";
    for (std::size_t q = 0; q < sol.s_of_q.size(); ++q) csv << q << ',' << sol.s_of_q[q] << ',' << io::csv_number(sol.bias[q]) << '\n';
    emit(m, result, csv.str(), out);
    return kOk;
}

inline int cmd_lp(const json& m, std::ostream& out) {
    const auto params = manifest_params(m);
    const double pth = required<double>(m, "pth");
    if (!(pth >= 0.0)) throw ValidationError(ValidationCode::BadRange, "pth must be nonnegative");
    const auto prog = build_lp(params, pth);
    if (m["inputs"].contains("export")) {
        write_file(m["inputs"]["export"].get<std::string>(), "\\ manifest: " + m.dump() + "\n" + export_lp_text(prog));
    }
    const auto sol = solve_simplex(prog);
    json result = io::to_json(sol);
    std::string csv = "status,objective\n" + std::string(simplex::to_string(sol.status)) + ",";
    if (sol.status == LpStatus::optimal) {
        const auto [policy, ss] = recover_policy(params, sol);
        result["policy"] = io::to_json(policy);
        result["steady_state"] = io::to_json(ss);
        csv += io::csv_number(sol.objective);
    }
    csv += "\n";
    emit(m, result, csv, out);
    return sol.status == LpStatus::optimal ? kOk : sol.status == LpStatus::infeasible ? kInfeasible : kNumerical;
}

inline int cmd_enumerate(const json& m, std::ostream& out) {
    const auto params = manifest_params(m);
    const double cap = optional_input<double>(m, "cap", kDefaultPolicyCap);
    const auto cloud = build_cloud(params, cap, thread_count());
    const auto curve = reference_curve(params, cloud);
    if (m["inputs"].contains("cloud")) {
        write_file(m["inputs"]["cloud"].get<std::string>(), csv_with_manifest(m, io::cloud_csv(cloud)));
    }
    json result{{"curve", io::to_json(curve)},
                {"policies", cloud.points.size() - cloud.multichain_policies.size()},
                {"multichain_policies", cloud.multichain_policies}};
    emit(m, result, io::curve_csv(curve), out);
    return kOk;
}

inline int cmd_simulate(const json& m, std::ostream& out) {
    const auto params = manifest_params(m);
    const auto policy = io::policy_from_json(params, read_json_file(required<std::string>(m, "policy")));
    SimConfig cfg;
    cfg.seed = required<std::uint64_t>(m, "seed");
    cfg.slots = required<std::int64_t>(m, "slots");
    cfg.warmup = optional_input<std::int64_t>(m, "warmup", cfg.warmup);
    cfg.q0 = optional_input<int>(m, "q0", cfg.q0);
    std::ofstream traj;
    if (m["inputs"].contains("trajectory")) {
        traj.open(m["inputs"]["trajectory"].get<std::string>());
        if (!traj) throw ValidationError(ValidationCode::BadRange, "cannot write trajectory file");
        traj << "# manifest: " << m.dump() << '\n';
        cfg.trajectory = &traj;
    }
    const auto r = simulate(params, policy, cfg);
    std::string csv = "power_mean,delay_mean,power_se,delay_se,slots_used\n" + io::csv_number(r.power_mean) + "," +
                      io::csv_number(r.delay_mean) + "," + io::csv_number(r.power_se) + "," + io::csv_number(r.delay_se) +
                      "," + std::to_string(r.slots_used) + "\n";
    json result = io::to_json(r);
    result["analytic"] = io::to_json(evaluate(params, policy));
    emit(m, result, csv, out);
    return kOk;
}

} // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Optimal delay-power tradeoff for a finite-buffer batch-arrival scheduler"};
    app.require_subcommand(1);
    Flags f;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "JSON config file (flags override it)");
        sub->add_option("--preset", f.preset, "built-in model: fig4 or fig5");
        sub->add_option("--alpha", f.alpha, "arrival probability override");
        sub->add_option("--format", f.format, "json (default) or csv");
        sub->add_option("--out", f.out, "output file instead of stdout");
    };

    auto* curve = app.add_subcommand("curve", "optimal tradeoff curve");
    common(curve);
    auto* query = app.add_subcommand("query", "minimum delay under a power budget");
    common(query);
    query->add_option("--pth", f.pth, "power budget");
    auto* relax = app.add_subcommand("relax", "policy iteration on delay + eta * power");
    common(relax);
    relax->add_option("--eta", f.eta, "power price");
    relax->add_option("--mode", f.mode, "exact (default) or backup");
    auto* lp = app.add_subcommand("lp", "linear program for a power budget");
    common(lp);
    lp->add_option("--pth", f.pth, "power budget");
    lp->add_option("--export", f.lp_export, "write the program in CPLEX-LP format");
    auto* enumerate = app.add_subcommand("enumerate", "brute-force reference curve");
    common(enumerate);
    enumerate->add_option("--cloud", f.cloud, "write every policy point as CSV");
    enumerate->add_option("--cap", f.cap, "maximum number of policies");
    auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate for a policy");
    common(sim);
    sim->add_option("--policy", f.policy, "policy JSON file");
    sim->add_option("--seed", f.seed, "random seed");
    sim->add_option("--slots", f.slots, "simulated slots");
    sim->add_option("--warmup", f.warmup, "discarded initial slots");
    sim->add_option("--q0", f.q0, "initial queue length");
    sim->add_option("--trajectory", f.trajectory, "per-slot CSV dump");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalid;
    }

    try {
        const auto* sub = app.get_subcommands().front();
        const json m = detail::resolve(sub->get_name(), f);
        const std::string name = sub->get_name();
        if (name == "curve") return detail::cmd_curve(m, out);
        if (name == "query") return detail::cmd_query(m, out);
        if (name == "relax") return detail::cmd_relax(m, out);
        if (name == "lp") return detail::cmd_lp(m, out);
        if (name == "enumerate") return detail::cmd_enumerate(m, out);
        if (name == "simulate") return detail::cmd_simulate(m, out);
        return kError;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kInvalid;
    } catch (const CountExceededError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kInvalid;
    } catch (const InfeasibleBudgetError& e) {
        err << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const NoConvergenceError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const MultiChainError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const json::exception& e) {
        err << "invalid input: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }
}

} // namespace tradeoff::cli
