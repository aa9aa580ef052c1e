/*
 Copyright 2026 The priorid Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
// priorid: identification of discrete-time LTI models from input/output data
// with prior knowledge expressed as equality constraints on Markov parameters.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "priorid/errors.hpp"
#include "priorid_app/commands.hpp"
#include "priorid_app/config.hpp"
#include "priorid_app/io.hpp"

namespace {

using namespace priorid;
using namespace priorid::app;

struct Flags {
    std::string config;
    std::string dataset;
    double Ts = 0.0;
    int horizon = 0;
    int q = 0;
    int p = 0;
    std::string mode;
    double weight = 0.0;
    std::string order;
    double order_tol = 0.0;
    std::string priors;
    std::vector<int> delays;
    std::uint64_t seed = 0;
    int mc_runs = 0;
    double snr_db = 0.0;
    std::string proto;
    std::string model;
    std::string input;
    int input_channel = 0;
    int samples = 0;
    int outputs = 0;
    int inputs = 0;
    std::string out_dir;
    std::string out;
};

struct Registered {
    CLI::App* app;
    std::vector<std::pair<std::string, CLI::Option*>> options;

    CLI::Option* get(const std::string& name) const {
        for (const auto& [n, o] : options) {
            if (n == name) {
                return o;
            }
        }
        return nullptr;
    }
    bool given(const std::string& name) const {
        const auto* o = get(name);
        return o && o->count() > 0;
    }
};

void add_option(Registered& r, const std::string& name, auto& target, const std::string& help) {
    r.options.emplace_back(name, r.app->add_option("--" + name, target, help));
}

RunConfig resolve(const Registered& r, const Flags& f) {
    RunConfig cfg = f.config.empty() ? RunConfig{} : load_run_config(f.config);
    if (r.given("dataset")) cfg.dataset = f.dataset;
    if (r.given("Ts")) cfg.Ts = f.Ts;
    if (r.given("horizon")) cfg.horizon = f.horizon;
    if (r.given("q")) cfg.block_rows = f.q;
    if (r.given("p")) cfg.block_cols = f.p;
    if (r.given("mode")) cfg.mode = parse_method(f.mode);
    if (r.given("weight")) cfg.weight = f.weight;
    if (r.given("order")) {
        if (f.order == "auto") {
            cfg.order.reset();
        } else {
            cfg.order = static_cast<int>(parse_number(f.order, "--order"));
        }
    }
    if (r.given("order-tol")) cfg.order_tolerance = f.order_tol;
    if (r.given("priors")) {
        std::ifstream in(f.priors);
        if (!in) {
            throw InputError("cannot open priors file '" + f.priors + "'");
        }
        try {
            const auto doc = nlohmann::json::parse(in);
            cfg.priors = parse_priors(doc.is_object() && doc.contains("priors") ? doc.at("priors") : doc,
                                      cfg.Ts);
        } catch (const nlohmann::json::exception& e) {
            throw InputError("priors file '" + f.priors + "': " + e.what());
        }
    }
    if (r.given("delays")) cfg.delays = f.delays;
    if (r.given("seed")) cfg.seed = f.seed;
    if (r.given("mc-runs")) cfg.mc_runs = f.mc_runs;
    if (r.given("snr-db")) cfg.snr_db = f.snr_db;
    if (r.given("proto")) {
        cfg.generator = Generator{parse_prototype(std::string_view(f.proto)), std::nullopt};
    }
    if (r.given("model")) cfg.generator = Generator{std::nullopt, f.model};
    if (r.given("input")) cfg.input = parse_input_kind(f.input);
    if (r.given("input-channel")) cfg.input_channel = f.input_channel;
    if (r.given("samples")) cfg.samples = f.samples;
    if (r.given("outputs")) cfg.outputs = f.outputs;
    if (r.given("inputs")) cfg.inputs = f.inputs;
    if (r.given("out-dir")) cfg.output_dir = f.out_dir;
    if (r.given("out")) cfg.output_file = f.out;
    return cfg;
}

void add_estimation_flags(Registered& r, Flags& f) {
    add_option(r, "Ts", f.Ts, "Sampling period [s]");
    add_option(r, "horizon", f.horizon, "Markov horizon l (number of lags after M_0)");
    add_option(r, "mode", f.mode, "unconstrained | exact | weighted");
    add_option(r, "weight", f.weight, "Constraint weight for weighted mode");
    add_option(r, "priors", f.priors, "JSON file with the prior list");
}

void add_generator_flags(Registered& r, Flags& f) {
    add_option(r, "proto", f.proto, "Prototype, e.g. first_order:K=2,tau=10");
    add_option(r, "model", f.model, "Model file of the true system");
    add_option(r, "input", f.input, "impulse | step | prbs | white");
    add_option(r, "input-channel", f.input_channel, "Input channel of the impulse (1-based)");
    add_option(r, "samples", f.samples, "Number of samples N");
    add_option(r, "snr-db", f.snr_db, "Output SNR in dB (omit for noise-free data)");
    add_option(r, "seed", f.seed, "Random seed");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Identify LTI models from data with prior knowledge on Markov parameters"};
    app.require_subcommand(1);
    Flags flags;

    auto make = [&](const char* name, const char* help) {
        Registered r{app.add_subcommand(name, help), {}};
        add_option(r, "config", flags.config, "JSON run configuration; flags override it");
        return r;
    };

    Registered simulate = make("simulate", "Simulate a prototype or model file into a dataset CSV");
    add_option(simulate, "Ts", flags.Ts, "Sampling period [s]");
    add_generator_flags(simulate, flags);
    add_option(simulate, "out", flags.out, "Output dataset CSV");

    Registered identify = make("identify", "Estimate Markov parameters and realize a model");
    add_option(identify, "dataset", flags.dataset, "Dataset CSV (t,u1..,y1..)");
    add_estimation_flags(identify, flags);
    add_option(identify, "q", flags.q, "Hankel block rows");
    add_option(identify, "p", flags.p, "Hankel block columns");
    add_option(identify, "order", flags.order, "Model order or 'auto'");
    add_option(identify, "order-tol", flags.order_tol, "Singular value ratio for auto order");
    add_option(identify, "delays", flags.delays, "Per-input delays in samples");
    add_option(identify, "out-dir", flags.out_dir, "Output directory");

    Registered compile_priors = make("compile-priors", "Dump the compiled A_eq, b_eq as CSV");
    add_option(compile_priors, "dataset", flags.dataset, "Dataset CSV giving channel counts");
    add_option(compile_priors, "Ts", flags.Ts, "Sampling period [s]");
    add_option(compile_priors, "horizon", flags.horizon, "Markov horizon l");
    add_option(compile_priors, "priors", flags.priors, "JSON file with the prior list");
    add_option(compile_priors, "outputs", flags.outputs, "Number of outputs (without dataset)");
    add_option(compile_priors, "inputs", flags.inputs, "Number of inputs (without dataset)");
    add_option(compile_priors, "out-dir", flags.out_dir, "Output directory");

    Registered mc = make("mc-compare", "Monte Carlo comparison of constrained and unconstrained fits");
    add_estimation_flags(mc, flags);
    add_generator_flags(mc, flags);
    add_option(mc, "mc-runs", flags.mc_runs, "Number of Monte Carlo runs");
    add_option(mc, "out-dir", flags.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (simulate.app->parsed()) {
            const auto data = run_simulate(resolve(simulate, flags));
            std::cout << "wrote " << data.samples() << " samples\n";
        } else if (identify.app->parsed()) {
            const auto result = run_identify(resolve(identify, flags));
            for (const auto& notice : result.notices) {
                std::cerr << "notice: " << notice << '\n';
            }
            std::cout << "order " << result.realization.order << ", residual "
                      << format_short(result.estimate.residual_norm) << ", constraint residual "
                      << format_short(result.estimate.constraint_residual) << '\n';
        } else if (compile_priors.app->parsed()) {
            const auto cs = run_compile_priors(resolve(compile_priors, flags));
            for (const auto& w : cs.warnings) {
                std::cerr << "warning: " << w << '\n';
            }
            const auto report = check_consistency(cs);
            std::cout << cs.rows() << " rows, rank " << report.rank
                      << (report.infeasible ? ", infeasible" : "") << '\n';
        } else if (mc.app->parsed()) {
            const auto s = run_mc_compare(resolve(mc, flags));
            std::cout << "median markov error: unconstrained "
                      << format_short(s.markov_unconstrained.median) << ", constrained "
                      << format_short(s.markov_constrained.median) << '\n';
        }
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}
