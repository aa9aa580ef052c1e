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
#include "priorid/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "priorid/errors.hpp"

namespace priorid {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct MinNormSolution {
    Eigen::VectorXd x;
    SolveDiagnostics diagnostics;
};

// Minimum-norm least-squares solution through a truncated SVD, with the
// rank tolerance sigma_max max(rows, cols) eps.
MinNormSolution solve_min_norm(const Eigen::MatrixXd& M, const Eigen::VectorXd& rhs) {
    MinNormSolution out;
    out.diagnostics.columns = M.cols();
    out.x = Eigen::VectorXd::Zero(M.cols());
    if (M.cols() == 0) {
        return out;
    }
    if (M.rows() == 0) {
        out.diagnostics.rank_deficient = true;
        out.diagnostics.condition = std::numeric_limits<double>::infinity();
        return out;
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double tol = sv(0) * static_cast<double>(std::max(M.rows(), M.cols())) * kEps;
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > tol) {
        ++rank;
    }

    auto& d = out.diagnostics;
    d.rank = rank;
    d.rank_deficient = rank < M.cols();
    d.sigma_max = sv(0);
    d.sigma_min = sv(sv.size() - 1);
    d.condition = d.rank_deficient || d.sigma_min == 0.0 ? std::numeric_limits<double>::infinity()
                                                         : d.sigma_max / d.sigma_min;
    if (rank > 0) {
        const Eigen::VectorXd coeffs =
            (svd.matrixU().leftCols(rank).transpose() * rhs).cwiseQuotient(sv.head(rank));
        out.x = svd.matrixV().leftCols(rank) * coeffs;
    }
    if (d.rank_deficient) {
        std::ostringstream os;
        os << "regression is rank deficient (rank " << rank << " of " << M.cols()
           << " columns); returning the minimum-norm solution";
        d.warnings.push_back(os.str());
    }
    return out;
}

void require_fit_shapes(const FirRegression& reg) {
    if (reg.Phi.rows() != reg.Yvec.size() || reg.Phi.cols() != reg.indexing.size()) {
        throw InputError("regression matrix, target and indexing disagree in size");
    }
    if (reg.Phi.rows() == 0) {
        throw InputError("empty regression");
    }
}

void require_constraint_shapes(const FirRegression& reg, const EqualityConstraintSet& cs) {
    if (!(cs.indexing == reg.indexing) || cs.A_eq.cols() != reg.Phi.cols() ||
        cs.A_eq.rows() != cs.b_eq.size()) {
        throw InputError("constraint set does not match the regression's Markov indexing");
    }
}

EstimateResult make_result(const FirRegression& reg, const EqualityConstraintSet* cs,
                           Eigen::VectorXd m, EstimationMethod method, double weight,
                           SolveDiagnostics diagnostics) {
    const double residual = (reg.Phi * m - reg.Yvec).norm();
    const double violation = cs ? constraint_residual(*cs, m) : 0.0;
    MarkovSequence markov = reg.indexing.unvec(m, reg.Ts);
    return EstimateResult{std::move(markov), std::move(m), residual, violation,
                          method,           weight,       std::move(diagnostics)};
}

} // namespace

void IdentDataset::validate() const {
    if (U.rows() != Y.rows()) {
        throw InputError("input has " + std::to_string(U.rows()) + " samples, output has " +
                         std::to_string(Y.rows()));
    }
    if (U.cols() < 1 || Y.cols() < 1) {
        throw InputError("dataset needs at least one input and one output channel");
    }
    if (!(std::isfinite(Ts) && Ts > 0.0)) {
        throw InputError("sampling period must be positive");
    }
    if (!U.allFinite() || !Y.allFinite()) {
        throw InputError("dataset contains non-finite entries");
    }
}

FirRegression build_fir_regression(const IdentDataset& data, int horizon) {
    data.validate();
    if (horizon < 0) {
        throw InputError("horizon must be nonnegative, got " + std::to_string(horizon));
    }
    const Eigen::Index N = data.samples();
    if (N <= horizon) {
        throw InputError("need more samples than the horizon: N = " + std::to_string(N) +
                         ", horizon = " + std::to_string(horizon));
    }

    MarkovIndexing indexing(data.outputs(), data.inputs(), horizon);
    const Eigen::Index ny = data.outputs();
    const Eigen::Index nu = data.inputs();
    const Eigen::Index blocks = N - horizon;

    FirRegression reg{Eigen::MatrixXd::Zero(blocks * ny, indexing.size()),
                      Eigen::VectorXd(blocks * ny), indexing, data.Ts};
    for (Eigen::Index b = 0; b < blocks; ++b) {
        const Eigen::Index t = b + horizon;
        reg.Yvec.segment(b * ny, ny) = data.Y.row(t).transpose();
        for (int k = 0; k <= horizon; ++k) {
            for (Eigen::Index j = 0; j < nu; ++j) {
                const double u = data.U(t - k, j);
                for (Eigen::Index i = 0; i < ny; ++i) {
                    reg.Phi(b * ny + i, k * ny * nu + j * ny + i) = u;
                }
            }
        }
    }
    return reg;
}

std::string to_string(EstimationMethod method) {
    switch (method) {
    case EstimationMethod::unconstrained:
        return "unconstrained";
    case EstimationMethod::exact:
        return "exact";
    case EstimationMethod::weighted:
        return "weighted";
    }
    return "unknown";
}

EstimateResult ls_unconstrained(const FirRegression& reg) {
    require_fit_shapes(reg);
    auto sol = solve_min_norm(reg.Phi, reg.Yvec);
    return make_result(reg, nullptr, std::move(sol.x), EstimationMethod::unconstrained, 0.0,
                       std::move(sol.diagnostics));
}

EstimateResult ls_equality_exact(const FirRegression& reg, const EqualityConstraintSet& cs) {
    require_fit_shapes(reg);
    require_constraint_shapes(reg, cs);
    if (cs.empty()) {
        auto sol = solve_min_norm(reg.Phi, reg.Yvec);
        return make_result(reg, &cs, std::move(sol.x), EstimationMethod::exact, 0.0,
                           std::move(sol.diagnostics));
    }

    const auto consistency = check_consistency(cs);
    if (consistency.infeasible) {
        throw InfeasibleError("equality constraints are inconsistent (rank " +
                              std::to_string(consistency.rank) +
                              " rises when the right-hand side is appended)");
    }

    // m = m_p + Z zeta, with m_p the minimum-norm solution of A_eq m = b_eq and
    // Z an orthonormal basis of the null space of A_eq.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(cs.A_eq, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double tol = sv(0) * static_cast<double>(std::max(cs.A_eq.rows(), cs.A_eq.cols())) * kEps;
    const Eigen::Index rank = (sv.array() > tol).count();
    const Eigen::VectorXd particular =
        svd.matrixV().leftCols(rank) *
        (svd.matrixU().leftCols(rank).transpose() * cs.b_eq).cwiseQuotient(sv.head(rank));
    const Eigen::MatrixXd null_basis = svd.matrixV().rightCols(cs.A_eq.cols() - rank);

    Eigen::VectorXd m = particular;
    SolveDiagnostics diagnostics;
    if (null_basis.cols() == 0) {
        diagnostics.columns = 0;
        diagnostics.warnings.push_back(
            "constraints determine every Markov parameter; the data were not used");
    } else {
        auto sol = solve_min_norm(reg.Phi * null_basis, reg.Yvec - reg.Phi * particular);
        m += null_basis * sol.x;
        diagnostics = std::move(sol.diagnostics);
    }

    auto result = make_result(reg, &cs, std::move(m), EstimationMethod::exact, 0.0,
                              std::move(diagnostics));
    if (result.constraint_residual > 1e-10 * (1.0 + cs.b_eq.norm())) {
        std::ostringstream os;
        os << "constraint residual " << result.constraint_residual
           << " exceeds the exact-mode tolerance";
        result.diagnostics.warnings.push_back(os.str());
    }
    return result;
}

double default_weight(const FirRegression& reg, const EqualityConstraintSet& cs) {
    const auto norm2 = [](const Eigen::MatrixXd& M) {
        if (M.size() == 0) {
            return 0.0;
        }
        return Eigen::BDCSVD<Eigen::MatrixXd>(M).singularValues()(0);
    };
    const double w = 1e6 * norm2(reg.Phi) / std::max(norm2(cs.A_eq), kEps);
    return w > 0.0 ? w : 1e6;
}

EstimateResult ls_equality_weighted(const FirRegression& reg, const EqualityConstraintSet& cs,
                                    std::optional<double> weight) {
    require_fit_shapes(reg);
    require_constraint_shapes(reg, cs);
    const double w = weight ? *weight : default_weight(reg, cs);
    if (!(std::isfinite(w) && w > 0.0)) {
        throw InputError("constraint weight must be positive and finite");
    }

    Eigen::MatrixXd stacked(reg.Phi.rows() + cs.rows(), reg.Phi.cols());
    stacked << reg.Phi, w * cs.A_eq;
    Eigen::VectorXd rhs(reg.Yvec.size() + cs.rows());
    rhs << reg.Yvec, w * cs.b_eq;

    auto sol = solve_min_norm(stacked, rhs);
    if (!cs.empty() && check_consistency(cs).infeasible) {
        sol.diagnostics.warnings.push_back(
            "equality constraints are inconsistent; the weighted fit blends them");
    }
    if (std::isfinite(sol.diagnostics.condition) && sol.diagnostics.condition > 1e12) {
        std::ostringstream os;
        os << "stacked weighted problem is poorly conditioned (condition "
           << sol.diagnostics.condition << ")";
        sol.diagnostics.warnings.push_back(os.str());
    }
    return make_result(reg, &cs, std::move(sol.x), EstimationMethod::weighted, w,
                       std::move(sol.diagnostics));
}

} // namespace priorid
