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
#include "priorid/realize.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "priorid/errors.hpp"

namespace priorid {

namespace {

void check_hankel_size(const MarkovSequence& markov, int block_rows, int block_cols) {
    if (block_rows < 1 || block_cols < 1) {
        throw InputError("Hankel block counts must be positive");
    }
    if (block_rows + block_cols - 1 > markov.horizon()) {
        std::ostringstream os;
        os << "Hankel matrix with " << block_rows << "x" << block_cols
           << " blocks needs M_1..M_" << block_rows + block_cols - 1
           << " but the Markov sequence stops at M_" << markov.horizon();
        throw InputError(os.str());
    }
}

// Rethrows library errors with the pipeline stage prefixed.
template <class F>
auto run_stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const InfeasibleError& e) {
        throw InfeasibleError(std::string(name) + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(name) + ": " + e.what());
    } catch (const InputError& e) {
        throw InputError(std::string(name) + ": " + e.what());
    }
}

} // namespace

Eigen::MatrixXd block_hankel(const MarkovSequence& markov, int block_rows, int block_cols) {
    check_hankel_size(markov, block_rows, block_cols);
    const Eigen::Index ny = markov.outputs();
    const Eigen::Index nu = markov.inputs();
    Eigen::MatrixXd H(block_rows * ny, block_cols * nu);
    for (int r = 0; r < block_rows; ++r) {
        for (int c = 0; c < block_cols; ++c) {
            H.block(r * ny, c * nu, ny, nu) = markov[r + c + 1];
        }
    }
    return H;
}

RealizationResult kung_realize(const MarkovSequence& markov, int block_rows, int block_cols,
                               OrderSelection order) {
    check_hankel_size(markov, block_rows, block_cols);
    if (block_rows < 2) {
        throw InputError("Kung realization needs at least 2 block rows for the shift equation");
    }
    const Eigen::Index ny = markov.outputs();
    const Eigen::Index nu = markov.inputs();
    const Eigen::MatrixXd H = block_hankel(markov, block_rows, block_cols);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();
    const int max_order = static_cast<int>(sv.size());

    int n = 0;
    if (order.fixed) {
        n = *order.fixed;
        if (n < 0 || n > max_order) {
            throw InputError("requested order " + std::to_string(n) +
                             " exceeds the Hankel rank bound " + std::to_string(max_order));
        }
    } else if (sv(0) > 0.0) {
        n = max_order;
        for (int k = 1; k < max_order; ++k) {
            if (sv(k) / sv(0) <= order.tolerance) {
                n = k;
                break;
            }
        }
    }

    Eigen::MatrixXd A(n, n), B(n, nu), C(ny, n);
    if (n > 0) {
        const Eigen::VectorXd root = sv.head(n).cwiseSqrt();
        const Eigen::MatrixXd obs = svd.matrixU().leftCols(n) * root.asDiagonal();
        const Eigen::MatrixXd ctr = root.asDiagonal() * svd.matrixV().leftCols(n).transpose();
        C = obs.topRows(ny);
        B = ctr.leftCols(nu);
        const Eigen::Index shifted = (block_rows - 1) * ny;
        A = obs.topRows(shifted).completeOrthogonalDecomposition().solve(obs.bottomRows(shifted));
    }

    StateSpaceModel model(std::move(A), std::move(B), std::move(C), markov[0],
                          markov.sampling_period());
    const int span = block_rows + block_cols - 1;
    const MarkovSequence realized = markov_sequence(model, span);
    double error = 0.0;
    for (int k = 1; k <= span; ++k) {
        error = std::max(error, (realized[k] - markov[k]).norm());
    }
    return RealizationResult{std::move(model), sv, n, error};
}

PipelineResult identify_pipeline(const IdentDataset& data, std::span<const PriorSpec> priors,
                                 const PipelineOptions& options) {
    run_stage("dataset", [&] { data.validate(); });
    if (options.horizon < 0) {
        throw InputError("dataset: horizon must be nonnegative");
    }

    std::vector<std::string> notices;
    const MarkovIndexing indexing =
        run_stage("compile", [&] { return MarkovIndexing(data.outputs(), data.inputs(), options.horizon); });
    EqualityConstraintSet constraints =
        run_stage("compile", [&] { return compile(priors, indexing, data.Ts); });
    ConsistencyReport consistency = check_consistency(constraints);
    for (const auto& w : constraints.warnings) {
        notices.push_back("compile: " + w);
    }

    EstimationMethod method = options.method;
    if (priors.empty() && method != EstimationMethod::unconstrained) {
        notices.push_back("no priors given; using the unconstrained estimator");
        method = EstimationMethod::unconstrained;
    }

    const FirRegression reg =
        run_stage("regression", [&] { return build_fir_regression(data, options.horizon); });

    EstimateResult estimate = run_stage("estimate", [&] {
        switch (method) {
        case EstimationMethod::exact:
            return ls_equality_exact(reg, constraints);
        case EstimationMethod::weighted:
            return ls_equality_weighted(reg, constraints, options.weight);
        case EstimationMethod::unconstrained:
            break;
        }
        return ls_unconstrained(reg);
    });
    for (const auto& w : estimate.diagnostics.warnings) {
        notices.push_back("estimate: " + w);
    }

    const int default_blocks = (options.horizon + 1) / 2;
    const int q = options.block_rows.value_or(default_blocks);
    const int p = options.block_cols.value_or(default_blocks);
    RealizationResult realization =
        run_stage("realize", [&] { return kung_realize(estimate.markov, q, p, options.order); });

    return PipelineResult{std::move(constraints), std::move(consistency), std::move(estimate),
                          std::move(realization), std::move(notices)};
}

} // namespace priorid
