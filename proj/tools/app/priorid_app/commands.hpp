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
#ifndef PRIORID_APP_COMMANDS_HPP
#define PRIORID_APP_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "priorid/realize.hpp"
#include "priorid_app/config.hpp"

namespace priorid::app {

/// Exit status of the command line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 2,
    kExitInfeasible = 3,
    kExitNumerical = 4,
};

/// Per-run seed, a splitmix64 mix of the master seed and the run index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct SimulationOptions {
    InputKind input = InputKind::white;
    int input_channel = 1;
    int samples = 100;
    std::optional<double> snr_db;
    std::uint64_t seed = 1;
};

/**
 * Simulates the model from rest with the requested excitation and adds white
 * Gaussian output noise at the given SNR (noise-free output power over noise
 * power, per output channel). Deterministic for a given seed.
 */
IdentDataset simulate_dataset(const StateSpaceModel& model, const SimulationOptions& options);

/// Ground-truth model of the config's generator; prototypes need Ts.
StateSpaceModel generator_model(const RunConfig& cfg);

/**
 * Removes known per-input delays: u_j(t) is replaced by u_j(t - d_j) and
 * the first max(d) samples are dropped.
 */
IdentDataset shift_inputs(const IdentDataset& data, std::span<const int> delays);

/// `simulate`: writes the dataset CSV to cfg.output_file and returns it.
IdentDataset run_simulate(const RunConfig& cfg);

/// Pipeline options derived from a config.
PipelineOptions pipeline_options(const RunConfig& cfg);

/// Structured diagnostics written by `identify`.
nlohmann::json diagnostics_json(const PipelineResult& result, const PipelineOptions& options);

/**
 * `identify`: loads cfg.dataset, removes delays, runs the pipeline and
 * writes model.txt, markov.csv and diagnostics.json into cfg.output_dir.
 * Infeasible priors in exact mode write diagnostics.json with the
 * consistency report, then throw InfeasibleError.
 */
PipelineResult run_identify(const RunConfig& cfg);

/// `compile-priors`: writes constraints.csv into cfg.output_dir.
EqualityConstraintSet run_compile_priors(const RunConfig& cfg);

struct McRun {
    int run = 0;
    std::uint64_t seed = 0;
    double markov_error_unconstrained = 0.0;
    double markov_error_constrained = 0.0;
    double dc_error_unconstrained = 0.0;
    double dc_error_constrained = 0.0;
};

struct McStatistics {
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double iqr() const { return q75 - q25; }
};

/// Constrained versus unconstrained comparison outcome on one metric.
struct McTally {
    int wins = 0;
    int ties = 0;
    int losses = 0;
};

/// Absolute difference under which two errors count as a tie.
inline constexpr double kTieTolerance = 1e-6;

struct McSummary {
    std::vector<McRun> runs;
    McStatistics markov_unconstrained;
    McStatistics markov_constrained;
    McStatistics dc_unconstrained;
    McStatistics dc_constrained;
    McTally markov_tally;
    McTally dc_tally;
};

McStatistics summarize(std::vector<double> values);

/**
 * Seeded Monte Carlo comparison of the unconstrained and constrained FIR
 * estimators. Markov errors are ||m - m_true|| / ||m_true||; DC errors are
 * the Frobenius distance between sum_k M_k and the true sum over the same
 * horizon.
 */
McSummary mc_compare(const StateSpaceModel& truth, std::span<const PriorSpec> priors,
                     const RunConfig& cfg);

/// `mc-compare`: runs mc_compare and writes mc_runs.csv and mc_summary.txt.
McSummary run_mc_compare(const RunConfig& cfg);

} // namespace priorid::app

#endif // PRIORID_APP_COMMANDS_HPP
