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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "priorid/discretize.hpp"
#include "priorid/realize.hpp"

namespace {

priorid::IdentDataset noisy_first_order(int samples) {
    const auto model = priorid::discretize(priorid::FirstOrder{2.0, 10.0}, 1.0);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd U(samples, 1);
    for (Eigen::Index i = 0; i < U.size(); ++i) {
        U(i) = normal(rng);
    }
    Eigen::MatrixXd Y = priorid::simulate(model, U);
    for (Eigen::Index i = 0; i < Y.size(); ++i) {
        Y(i) += 0.1 * normal(rng);
    }
    return {U, Y, 1.0};
}

void BM_MarkovSequence(benchmark::State& state) {
    const auto n = state.range(0);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd A = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return normal(rng); });
    A *= 0.9 / priorid::spectral_radius(A);
    const priorid::StateSpaceModel model(A, Eigen::MatrixXd::Ones(n, 2), Eigen::MatrixXd::Ones(2, n),
                                         Eigen::MatrixXd::Zero(2, 2), 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(priorid::markov_sequence(model, 100));
    }
}
BENCHMARK(BM_MarkovSequence)->Arg(4)->Arg(16)->Arg(64);

void BM_FirExact(benchmark::State& state) {
    const auto data = noisy_first_order(static_cast<int>(state.range(0)));
    const int horizon = 30;
    const std::vector<priorid::PriorSpec> priors{priorid::prior::FirstOrderDecay{{1, 1}, 10.0, std::nullopt}};
    for (auto _ : state) {
        const auto reg = priorid::build_fir_regression(data, horizon);
        const auto cs = priorid::compile(priors, reg.indexing, 1.0);
        benchmark::DoNotOptimize(priorid::ls_equality_exact(reg, cs));
    }
}
BENCHMARK(BM_FirExact)->Arg(80)->Arg(400)->Arg(2000);

void BM_FirUnconstrained(benchmark::State& state) {
    const auto data = noisy_first_order(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(priorid::ls_unconstrained(priorid::build_fir_regression(data, 30)));
    }
}
BENCHMARK(BM_FirUnconstrained)->Arg(80)->Arg(400)->Arg(2000);

void BM_Kung(benchmark::State& state) {
    const auto q = static_cast<int>(state.range(0));
    const auto seq = priorid::prototype_markov(priorid::SecondOrderOsc{1.0, 1.0, 0.3}, 0.5, 2 * q);
    for (auto _ : state) {
        benchmark::DoNotOptimize(priorid::kung_realize(seq, q, q));
    }
}
BENCHMARK(BM_Kung)->Arg(5)->Arg(20)->Arg(50);

} // namespace

BENCHMARK_MAIN();
