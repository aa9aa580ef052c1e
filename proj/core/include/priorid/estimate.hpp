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
#ifndef PRIORID_ESTIMATE_HPP
#define PRIORID_ESTIMATE_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "priorid/priors.hpp"
#include "priorid/statespace.hpp"

namespace priorid {

/// Sampled input/output record.
struct IdentDataset {
    Eigen::MatrixXd U;  ///< N x n_u
    Eigen::MatrixXd Y;  ///< N x n_y
    double Ts = 1.0;

    Eigen::Index samples() const { return U.rows(); }
    Eigen::Index inputs() const { return U.cols(); }
    Eigen::Index outputs() const { return Y.cols(); }

    /// Throws InputError on mismatched row counts, empty channels,
    /// nonpositive Ts or non-finite entries.
    void validate() const;
};

/**
 * Truncated impulse-response regression Yvec ~ Phi m.
 *
 * For t = l..N-1 the block of n_y rows starting at (t - l) n_y encodes
 * y(t) = sum_{k=0}^{l} M_k u(t - k), with the columns of Phi ordered by
 * MarkovIndexing.
 */
struct FirRegression {
    Eigen::MatrixXd Phi;
    Eigen::VectorXd Yvec;
    MarkovIndexing indexing;
    double Ts = 1.0;
};

FirRegression build_fir_regression(const IdentDataset& data, int horizon);

enum class EstimationMethod { unconstrained, exact, weighted };

std::string to_string(EstimationMethod method);

struct SolveDiagnostics {
    Eigen::Index rank = 0;
    Eigen::Index columns = 0;
    bool rank_deficient = false;
    double sigma_max = 0.0;
    double sigma_min = 0.0;
    /// sigma_max / sigma_min of the matrix actually factorized; infinite
    /// when rank deficient.
    double condition = 0.0;
    std::vector<std::string> warnings;
};

struct EstimateResult {
    MarkovSequence markov;
    Eigen::VectorXd parameters;
    /// || Phi m - Yvec ||_2
    double residual_norm = 0.0;
    /// || A_eq m - b_eq ||_2, zero for unconstrained fits.
    double constraint_residual = 0.0;
    EstimationMethod method = EstimationMethod::unconstrained;
    /// Weight of the constraint rows, set for the weighted method only.
    double weight = 0.0;
    SolveDiagnostics diagnostics;
};

/// Minimum-norm least squares; rank deficiency is reported, not fatal.
EstimateResult ls_unconstrained(const FirRegression& reg);

/**
 * Equality-constrained least squares by null-space elimination.
 * Throws InfeasibleError when the constraints are inconsistent.
 */
EstimateResult ls_equality_exact(const FirRegression& reg, const EqualityConstraintSet& cs);

/**
 * Method of weighting: minimizes ||Phi m - Yvec||^2 + w^2 ||A_eq m - b_eq||^2
 * as one stacked least-squares problem. Without a weight, default_weight()
 * is used. Inconsistent constraints produce a warning.
 */
EstimateResult ls_equality_weighted(const FirRegression& reg, const EqualityConstraintSet& cs,
                                    std::optional<double> weight = std::nullopt);

/// 1e6 sigma_max(Phi) / max(sigma_max(A_eq), eps)
double default_weight(const FirRegression& reg, const EqualityConstraintSet& cs);

} // namespace priorid

#endif // PRIORID_ESTIMATE_HPP
