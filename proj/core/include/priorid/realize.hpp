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
#ifndef PRIORID_REALIZE_HPP
#define PRIORID_REALIZE_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "priorid/estimate.hpp"
#include "priorid/priors.hpp"
#include "priorid/statespace.hpp"

namespace priorid {

/**
 * Block Hankel matrix with block (r, c) = M_{r+c-1}, r = 1..block_rows,
 * c = 1..block_cols. Needs block_rows + block_cols - 1 <= horizon.
 */
Eigen::MatrixXd block_hankel(const MarkovSequence& markov, int block_rows, int block_cols);

/// Model order rule: a fixed order, or the smallest n with
/// sigma_{n+1} / sigma_1 <= tolerance.
struct OrderSelection {
    std::optional<int> fixed;
    double tolerance = 1e-8;

    static OrderSelection automatic(double tol = 1e-8) { return {std::nullopt, tol}; }
    static OrderSelection exactly(int order) { return {order, 1e-8}; }
};

struct RealizationResult {
    StateSpaceModel model;
    /// Singular values of the Hankel matrix, descending.
    Eigen::VectorXd singular_values;
    int order = 0;
    /// max_k || M_k(realized) - M_k ||_F over k = 1..q+p-1.
    double reconstruction_error = 0.0;
};

/**
 * Kung's SVD realization in balanced coordinates. C and B come from the
 * first block row/column of the observability and controllability factors,
 * A from the shift equation of the observability factor, D = M_0.
 */
RealizationResult kung_realize(const MarkovSequence& markov, int block_rows, int block_cols,
                               OrderSelection order = OrderSelection::automatic());

struct PipelineOptions {
    int horizon = 10;
    /// Hankel block rows/columns; both default to floor((horizon + 1) / 2).
    std::optional<int> block_rows;
    std::optional<int> block_cols;
    EstimationMethod method = EstimationMethod::exact;
    std::optional<double> weight;
    OrderSelection order = OrderSelection::automatic();
};

struct PipelineResult {
    EqualityConstraintSet constraints;
    ConsistencyReport consistency;
    EstimateResult estimate;
    RealizationResult realization;
    std::vector<std::string> notices;
};

/**
 * compile -> build_fir_regression -> least squares -> kung_realize.
 * With no priors the method falls back to unconstrained. Errors are
 * rethrown with the failing stage prefixed to the message.
 */
PipelineResult identify_pipeline(const IdentDataset& data, std::span<const PriorSpec> priors,
                                 const PipelineOptions& options);

} // namespace priorid

#endif // PRIORID_REALIZE_HPP
