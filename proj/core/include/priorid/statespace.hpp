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
#ifndef PRIORID_STATESPACE_HPP
#define PRIORID_STATESPACE_HPP

#include <vector>

#include <Eigen/Dense>

namespace priorid {

/**
 * @brief Discrete-time LTI model
 *
 *   x(t+1) = A x(t) + B u(t)
 *   y(t)   = C x(t) + D u(t)
 *
 * sampled with period Ts. A model with zero states is a pure feedthrough
 * whose Markov sequence is D, 0, 0, ...
 *
 * Instances are immutable; the constructor validates dimensions.
 */
class StateSpaceModel {
public:
    StateSpaceModel(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C,
                    Eigen::MatrixXd D, double Ts);

    const Eigen::MatrixXd& A() const { return A_; }
    const Eigen::MatrixXd& B() const { return B_; }
    const Eigen::MatrixXd& C() const { return C_; }
    const Eigen::MatrixXd& D() const { return D_; }
    double sampling_period() const { return Ts_; }

    Eigen::Index states() const { return A_.rows(); }
    Eigen::Index inputs() const { return D_.cols(); }
    Eigen::Index outputs() const { return D_.rows(); }

private:
    Eigen::MatrixXd A_, B_, C_, D_;
    double Ts_;
};

/**
 * @brief Impulse-response coefficients M_0..M_l of an LTI system.
 *
 * M_0 = D and M_k = C A^{k-1} B for k >= 1. Every block has shape
 * outputs() x inputs(); horizon() is l, so there are l + 1 blocks.
 */
class MarkovSequence {
public:
    MarkovSequence(std::vector<Eigen::MatrixXd> blocks, double Ts);

    /// All-zero sequence of the given shape.
    static MarkovSequence zeros(Eigen::Index outputs, Eigen::Index inputs,
                                int horizon, double Ts);

    const Eigen::MatrixXd& operator[](int k) const { return blocks_[static_cast<std::size_t>(k)]; }
    const std::vector<Eigen::MatrixXd>& blocks() const { return blocks_; }

    int horizon() const { return static_cast<int>(blocks_.size()) - 1; }
    Eigen::Index outputs() const { return blocks_.front().rows(); }
    Eigen::Index inputs() const { return blocks_.front().cols(); }
    double sampling_period() const { return Ts_; }

    /// Sum of all blocks, the truncated DC gain.
    Eigen::MatrixXd sum() const;

private:
    std::vector<Eigen::MatrixXd> blocks_;
    double Ts_;
};

/// Input/output record of one simulation run.
struct SimulationRecord {
    Eigen::MatrixXd U;  ///< N x n_u
    Eigen::MatrixXd Y;  ///< N x n_y
    Eigen::VectorXd x0;
    double Ts = 1.0;
};

/**
 * Simulates the model from initial state x0. Row t of U is u(t)^T and row t
 * of the result is y(t)^T.
 */
Eigen::MatrixXd simulate(const StateSpaceModel& model, const Eigen::MatrixXd& U,
                         const Eigen::VectorXd& x0);

/// Simulates from the zero initial state.
Eigen::MatrixXd simulate(const StateSpaceModel& model, const Eigen::MatrixXd& U);

/// Runs simulate() and packages the result.
SimulationRecord simulate_record(const StateSpaceModel& model, const Eigen::MatrixXd& U,
                                 const Eigen::VectorXd& x0);

/// N x n_u input with a unit impulse at t = 0 on the 1-based channel `input`.
Eigen::MatrixXd unit_impulse(Eigen::Index samples, Eigen::Index inputs, int input);

/// M_0..M_horizon by the running product (C A^{k-1}) B.
MarkovSequence markov_sequence(const StateSpaceModel& model, int horizon);

/**
 * Output of the model for a unit impulse on the 1-based input channel,
 * as a (horizon + 1) x n_y matrix. Row k equals column `input` of M_k.
 */
Eigen::MatrixXd pulse_response(const StateSpaceModel& model, int input, int horizon);

/// Largest eigenvalue modulus; zero for an empty matrix.
double spectral_radius(const Eigen::MatrixXd& A);

/// Spectral radius bound above which a model is treated as not stable.
inline constexpr double kStabilityMargin = 1.0 - 1e-9;

/**
 * D + C (I - A)^{-1} B, the limit of the Markov sum.
 * Throws NumericalError when the spectral radius of A is not below
 * kStabilityMargin.
 */
Eigen::MatrixXd dc_gain(const StateSpaceModel& model);

/// Largest accepted 2-norm condition number of a similarity transform.
inline constexpr double kMaxSimilarityCondition = 1e12;

/// Returns (T A T^{-1}, T B, C T^{-1}, D). Throws NumericalError for
/// singular or ill-conditioned T.
StateSpaceModel apply_similarity(const StateSpaceModel& model, const Eigen::MatrixXd& T,
                                 double max_condition = kMaxSimilarityCondition);

} // namespace priorid

#endif // PRIORID_STATESPACE_HPP
