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
#ifndef PRIORID_APP_CONFIG_HPP
#define PRIORID_APP_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "priorid/discretize.hpp"
#include "priorid/estimate.hpp"
#include "priorid/priors.hpp"

namespace priorid::app {

enum class InputKind { impulse, step, prbs, white };

InputKind parse_input_kind(std::string_view text);
std::string to_string(InputKind kind);

EstimationMethod parse_method(std::string_view text);

/// Ground-truth system for simulation: a prototype or a model file.
struct Generator {
    std::optional<PrototypeModel> prototype;
    std::optional<std::filesystem::path> model_file;

    bool empty() const { return !prototype && !model_file; }
};

/// Everything a subcommand may need. Unset optionals fall back to the
/// documented defaults of each subcommand.
struct RunConfig {
    std::filesystem::path dataset;
    std::optional<double> Ts;
    int horizon = 20;
    std::optional<int> block_rows;
    std::optional<int> block_cols;
    EstimationMethod mode = EstimationMethod::exact;
    std::optional<double> weight;
    std::optional<int> order;
    double order_tolerance = 1e-8;
    std::vector<PriorSpec> priors;
    /// Per-input integer sample delays, removed by shifting the inputs.
    std::vector<int> delays;
    std::uint64_t seed = 1;
    int mc_runs = 100;
    std::optional<double> snr_db;
    Generator generator;
    InputKind input = InputKind::white;
    int input_channel = 1;
    int samples = 100;
    /// Channel counts for compile-priors when no dataset is given.
    std::optional<int> outputs;
    std::optional<int> inputs;
    std::filesystem::path output_dir = ".";
    std::filesystem::path output_file;
};

/**
 * Prior entries are objects `{"type": ..., "i": output, "j": input, ...}`:
 *
 *   {"type": "dc_gain", "i": 1, "j": 1, "value": 2.0}
 *   {"type": "dc_gain_matrix", "matrix": [[2.0, 0.0], [0.5, 1.0]]}
 *   {"type": "gain_ratio", "i": 1, "j": 1, "p": 1, "q": 2, "ratio": 0.5}
 *   {"type": "first_order", "i": 1, "j": 1, "tau": 10.0, "K": 2.0}
 *   {"type": "integrator", "i": 1, "j": 1, "K": 3.0}
 *   {"type": "second_order", "i": 1, "j": 1, "alpha1": -1.6, "alpha0": 0.64,
 *    "beta1": 0.1, "beta0": 0.07}
 *   {"type": "zero_channel", "i": 1, "j": 2}
 *
 * "K", "beta1"/"beta0" are optional. A second_order entry may give
 * "prototype": {...} instead of the alphas; the coefficients are then
 * computed for the sampling period Ts, and "with_gain": true adds the seed.
 */
PriorSpec parse_prior(const nlohmann::json& entry, std::optional<double> Ts = std::nullopt);
std::vector<PriorSpec> parse_priors(const nlohmann::json& list,
                                    std::optional<double> Ts = std::nullopt);

/// {"prototype": "first_order", "K": 2, "tau": 10}; names integrator,
/// first_order, integrator_first_order, two_time_constants, second_order
/// (or G1..G5) with parameters K, tau, tau1, tau2, w0, xi.
PrototypeModel parse_prototype(const nlohmann::json& spec);

/// Compact form "first_order:K=2,tau=10".
PrototypeModel parse_prototype(std::string_view text);

/// Builds a RunConfig from a JSON document. Relative paths are resolved
/// against `base_dir`.
RunConfig run_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

RunConfig load_run_config(const std::filesystem::path& path);

} // namespace priorid::app

#endif // PRIORID_APP_CONFIG_HPP
