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
#include "priorid/statespace.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "priorid/errors.hpp"

namespace priorid {

namespace {

std::string shape(const Eigen::MatrixXd& M) {
    std::ostringstream os;
    os << M.rows() << "x" << M.cols();
    return os.str();
}

void require(bool condition, const std::string& message) {
    if (!condition) {
        throw InputError(message);
    }
}

} // namespace

StateSpaceModel::StateSpaceModel(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C,
                                 Eigen::MatrixXd D, double Ts)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)), Ts_(Ts) {
    require(A_.rows() == A_.cols(), "state matrix A must be square, got " + shape(A_));
    require(B_.rows() == A_.rows(),
            "B has " + std::to_string(B_.rows()) + " rows, expected n = " + std::to_string(A_.rows()));
    require(C_.cols() == A_.rows(),
            "C has " + std::to_string(C_.cols()) + " columns, expected n = " + std::to_string(A_.rows()));
    require(D_.rows() == C_.rows() && D_.cols() == B_.cols(),
            "D is " + shape(D_) + ", expected " + std::to_string(C_.rows()) + "x" +
                std::to_string(B_.cols()));
    require(D_.rows() > 0 && D_.cols() > 0, "model needs at least one input and one output");
    require(std::isfinite(Ts_) && Ts_ > 0.0, "sampling period must be positive");
}

MarkovSequence::MarkovSequence(std::vector<Eigen::MatrixXd> blocks, double Ts)
    : blocks_(std::move(blocks)), Ts_(Ts) {
    require(!blocks_.empty(), "Markov sequence needs at least M_0");
    const auto rows = blocks_.front().rows();
    const auto cols = blocks_.front().cols();
    require(rows > 0 && cols > 0, "Markov blocks must be nonempty");
    for (std::size_t k = 1; k < blocks_.size(); ++k) {
        require(blocks_[k].rows() == rows && blocks_[k].cols() == cols,
                "Markov block " + std::to_string(k) + " is " + shape(blocks_[k]) + ", expected " +
                    shape(blocks_.front()));
    }
    require(std::isfinite(Ts_) && Ts_ > 0.0, "sampling period must be positive");
}

MarkovSequence MarkovSequence::zeros(Eigen::Index outputs, Eigen::Index inputs, int horizon,
                                     double Ts) {
    require(horizon >= 0, "horizon must be nonnegative");
    return MarkovSequence(
        std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(horizon) + 1,
                                     Eigen::MatrixXd::Zero(outputs, inputs)),
        Ts);
}

Eigen::MatrixXd MarkovSequence::sum() const {
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(outputs(), inputs());
    for (const auto& block : blocks_) {
        total += block;
    }
    return total;
}

Eigen::MatrixXd simulate(const StateSpaceModel& model, const Eigen::MatrixXd& U,
                         const Eigen::VectorXd& x0) {
    require(U.cols() == model.inputs(), "input has " + std::to_string(U.cols()) +
                                            " columns, model has n_u = " +
                                            std::to_string(model.inputs()));
    require(x0.size() == model.states(), "initial state has length " + std::to_string(x0.size()) +
                                             ", model has n = " + std::to_string(model.states()));

    Eigen::MatrixXd Y(U.rows(), model.outputs());
    Eigen::VectorXd x = x0;
    for (Eigen::Index t = 0; t < U.rows(); ++t) {
        const Eigen::VectorXd u = U.row(t).transpose();
        Y.row(t) = (model.C() * x + model.D() * u).transpose();
        x = model.A() * x + model.B() * u;
    }
    return Y;
}

Eigen::MatrixXd simulate(const StateSpaceModel& model, const Eigen::MatrixXd& U) {
    return simulate(model, U, Eigen::VectorXd::Zero(model.states()));
}

SimulationRecord simulate_record(const StateSpaceModel& model, const Eigen::MatrixXd& U,
                                 const Eigen::VectorXd& x0) {
    return SimulationRecord{U, simulate(model, U, x0), x0, model.sampling_period()};
}

Eigen::MatrixXd unit_impulse(Eigen::Index samples, Eigen::Index inputs, int input) {
    require(input >= 1 && input <= inputs, "input channel " + std::to_string(input) +
                                               " outside 1.." + std::to_string(inputs));
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(samples, inputs);
    if (samples > 0) {
        U(0, input - 1) = 1.0;
    }
    return U;
}

MarkovSequence markov_sequence(const StateSpaceModel& model, int horizon) {
    require(horizon >= 0, "horizon must be nonnegative, got " + std::to_string(horizon));
    std::vector<Eigen::MatrixXd> blocks;
    blocks.reserve(static_cast<std::size_t>(horizon) + 1);
    blocks.push_back(model.D());
    Eigen::MatrixXd CA = model.C();  // C A^{k-1}
    for (int k = 1; k <= horizon; ++k) {
        blocks.push_back(CA * model.B());
        if (k < horizon) {
            CA = CA * model.A();
        }
    }
    return MarkovSequence(std::move(blocks), model.sampling_period());
}

Eigen::MatrixXd pulse_response(const StateSpaceModel& model, int input, int horizon) {
    require(horizon >= 0, "horizon must be nonnegative, got " + std::to_string(horizon));
    return simulate(model, unit_impulse(horizon + 1, model.inputs(), input));
}

double spectral_radius(const Eigen::MatrixXd& A) {
    if (A.size() == 0) {
        return 0.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(A, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigenvalue computation did not converge");
    }
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd dc_gain(const StateSpaceModel& model) {
    const double rho = spectral_radius(model.A());
    if (!(rho < kStabilityMargin)) {
        std::ostringstream os;
        os << "DC gain requires a stable model, spectral radius of A is " << rho;
        throw NumericalError(os.str());
    }
    if (model.states() == 0) {
        return model.D();
    }
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(model.states(), model.states());
    return model.D() + model.C() * (I - model.A()).partialPivLu().solve(model.B());
}

StateSpaceModel apply_similarity(const StateSpaceModel& model, const Eigen::MatrixXd& T,
                                 double max_condition) {
    const auto n = model.states();
    require(T.rows() == n && T.cols() == n,
            "similarity transform is " + shape(T) + ", expected " + std::to_string(n) + "x" +
                std::to_string(n));
    if (n == 0) {
        return model;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(T);
    const auto& sv = svd.singularValues();
    const double sigma_min = sv(n - 1);
    if (!(sigma_min > 0.0) || sv(0) / sigma_min > max_condition) {
        std::ostringstream os;
        os << "similarity transform is singular or ill-conditioned (condition number "
           << (sigma_min > 0.0 ? sv(0) / sigma_min : INFINITY) << ", limit " << max_condition << ")";
        throw NumericalError(os.str());
    }
    const Eigen::MatrixXd Tinv = T.partialPivLu().inverse();
    return StateSpaceModel(T * model.A() * Tinv, T * model.B(), model.C() * Tinv, model.D(),
                           model.sampling_period());
}

} // namespace priorid
