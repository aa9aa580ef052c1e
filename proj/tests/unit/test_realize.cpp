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

#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "priorid/discretize.hpp"
#include "priorid/errors.hpp"
#include "priorid/realize.hpp"

using namespace priorid;
using priorid::testing::random_stable_model;
using priorid::testing::uniform_int;

namespace {

MarkovSequence scalar_sequence(double a, int horizon) {
    std::vector<Eigen::MatrixXd> blocks{Eigen::MatrixXd::Zero(1, 1)};
    double v = 1.0;
    for (int k = 1; k <= horizon; ++k) {
        blocks.push_back(Eigen::MatrixXd::Constant(1, 1, v));
        v *= a;
    }
    return MarkovSequence(std::move(blocks), 1.0);
}

double max_markov_error(const StateSpaceModel& model, const MarkovSequence& ref) {
    const auto seq = markov_sequence(model, ref.horizon());
    double err = 0.0;
    for (int k = 0; k <= ref.horizon(); ++k) {
        err = std::max(err, (seq[k] - ref[k]).norm());
    }
    return err;
}

IdentDataset white_data(const StateSpaceModel& model, int samples, std::uint64_t seed, double noise) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd U(samples, model.inputs());
    for (Eigen::Index i = 0; i < U.size(); ++i) {
        U.data()[i] = normal(rng);
    }
    Eigen::MatrixXd Y = simulate(model, U);
    for (Eigen::Index i = 0; i < Y.size(); ++i) {
        Y.data()[i] += noise * normal(rng);
    }
    return {U, Y, model.sampling_period()};
}

} // namespace

TEST_CASE("block_hankel") {
    const auto seq = scalar_sequence(0.5, 4);
    Eigen::MatrixXd expected(2, 2);
    expected << 1, 0.5, 0.5, 0.25;
    CHECK(block_hankel(seq, 2, 2) == expected);
    CHECK(block_hankel(MarkovSequence::zeros(2, 3, 6, 1.0), 3, 3).isZero(0.0));
    CHECK(block_hankel(MarkovSequence::zeros(2, 3, 6, 1.0), 3, 3).rows() == 6);
    CHECK(block_hankel(MarkovSequence::zeros(2, 3, 6, 1.0), 3, 3).cols() == 9);

    const Eigen::MatrixXd H = block_hankel(scalar_sequence(0.8, 9), 5, 5);
    CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(H).rank() == 1);

    CHECK_THROWS_AS(block_hankel(seq, 3, 3), InputError);
    CHECK_THROWS_AS(block_hankel(seq, 0, 2), InputError);
}

TEST_CASE("kung_realize examples") {
    SUBCASE("scalar geometric sequence") {
        const auto r = kung_realize(scalar_sequence(0.5, 6), 3, 3);
        CHECK(r.order == 1);
        CHECK(std::abs(r.model.A()(0, 0) - 0.5) <= 1e-10);
        CHECK(max_markov_error(r.model, scalar_sequence(0.5, 6)) <= 1e-10);
        CHECK(r.reconstruction_error <= 1e-10);
    }
    SUBCASE("zero sequence gives a pure feedthrough") {
        auto blocks = MarkovSequence::zeros(1, 2, 6, 1.0).blocks();
        blocks[0] << 3, 4;
        const auto r = kung_realize(MarkovSequence(blocks, 1.0), 3, 3);
        CHECK(r.order == 0);
        CHECK(r.model.states() == 0);
        CHECK(r.model.D() == blocks[0]);
    }
    SUBCASE("oscillatory prototype") {
        const SecondOrderOsc proto{1.0, 1.0, 0.5};
        const auto c = zoh_second_order(proto, 0.5);
        const auto r = kung_realize(markov_sequence(controller_form(c), 10), 5, 5);
        REQUIRE(r.order == 2);
        const auto roots = priorid::testing::quadratic_roots(c.alpha1, c.alpha0);
        Eigen::MatrixXd ref(2, 2);
        ref << -c.alpha1, -c.alpha0, 1, 0;
        CHECK(priorid::testing::eigenvalue_distance(r.model.A(), ref) <= 1e-8);
        const Eigen::VectorXcd eig = r.model.A().eigenvalues();
        double err = 0.0;
        for (const auto& z : roots) {
            err = std::max(err, std::min(std::abs(eig(0) - z), std::abs(eig(1) - z)));
        }
        CHECK(err <= 1e-8);
    }
    SUBCASE("fixed order and argument errors") {
        const auto seq = scalar_sequence(0.5, 6);
        CHECK(kung_realize(seq, 3, 3, OrderSelection::exactly(2)).order == 2);
        CHECK_THROWS_AS(kung_realize(seq, 3, 3, OrderSelection::exactly(4)), InputError);
        CHECK_THROWS_AS(kung_realize(seq, 1, 3), InputError);
        CHECK_THROWS_AS(kung_realize(seq, 4, 4), InputError);
    }
}

TEST_CASE("kung_realize round trip on random models") {
    std::mt19937_64 rng(29);
    int tested = 0;
    while (tested < 60) {
        const int n = uniform_int(rng, 1, 4);
        const auto model = random_stable_model(rng, n, uniform_int(rng, 1, 2), uniform_int(rng, 1, 2));
        const int q = n + 2;
        const auto seq = markov_sequence(model, 2 * q);
        const Eigen::VectorXd sv = Eigen::BDCSVD<Eigen::MatrixXd>(block_hankel(seq, q, q)).singularValues();
        if (sv(n - 1) / sv(0) < 1e-6) {
            continue;  // nearly non-minimal draw
        }
        ++tested;
        const auto r = kung_realize(seq, q, q);
        CHECK(r.order == n);
        CHECK(r.reconstruction_error <= 1e-8);
        CHECK(r.model.D() == model.D());
        CHECK(priorid::testing::eigenvalue_distance(r.model.A(), model.A()) <= 1e-7);
        CHECK(spectral_radius(r.model.A()) < 1.0 + 1e-9);
        for (Eigen::Index i = 1; i < sv.size(); ++i) {
            CHECK(r.singular_values(i) <= r.singular_values(i - 1));
        }
    }
}

TEST_CASE("identify_pipeline") {
    SUBCASE("noise-free first-order data with its decay prior") {
        const FirstOrder proto{2.0, 10.0};
        const auto model = discretize(proto, 1.0);
        const auto data = white_data(model, 400, 31, 0.0);
        const std::vector<PriorSpec> priors{prior::FirstOrderDecay{{1, 1}, 10.0, std::nullopt}};
        PipelineOptions opt;
        opt.horizon = 300;
        opt.block_rows = 3;
        opt.block_cols = 3;
        const auto r = identify_pipeline(data, priors, opt);
        CHECK(r.realization.order == 1);
        CHECK(std::abs(dc_gain(r.realization.model)(0, 0) - 2.0) <= 1e-6);
        CHECK(r.estimate.constraint_residual <= 1e-8);
    }
    SUBCASE("empty priors equal the unconstrained pipeline") {
        std::mt19937_64 rng(37);
        const auto model = random_stable_model(rng, 2, 1, 1);
        const auto data = white_data(model, 100, 37, 0.05);
        PipelineOptions opt;
        opt.horizon = 12;
        const auto a = identify_pipeline(data, {}, opt);
        opt.method = EstimationMethod::unconstrained;
        const auto b = identify_pipeline(data, {}, opt);
        CHECK(a.estimate.method == EstimationMethod::unconstrained);
        CHECK(a.notices.size() == 1);
        CHECK(a.estimate.parameters == b.estimate.parameters);
        CHECK(a.realization.model.A() == b.realization.model.A());
    }
    SUBCASE("zero channel survives realization") {
        std::mt19937_64 rng(41);
        auto truth = random_stable_model(rng, 2, 2, 1);
        Eigen::MatrixXd B = truth.B();
        B.col(1).setZero();
        Eigen::MatrixXd D = truth.D();
        D(0, 1) = 0.0;
        truth = StateSpaceModel(truth.A(), B, truth.C(), D, 1.0);
        const auto data = white_data(truth, 200, 41, 0.1);
        const std::vector<PriorSpec> priors{prior::ZeroChannel{{1, 2}}};
        PipelineOptions opt;
        opt.horizon = 15;
        const auto r = identify_pipeline(data, priors, opt);
        const auto seq = markov_sequence(r.realization.model, 15);
        double norm = 0.0;
        for (int k = 0; k <= 15; ++k) {
            norm = std::hypot(norm, seq[k](0, 1));
        }
        CHECK(norm <= 1e-8);
    }
    SUBCASE("stage names in errors") {
        std::mt19937_64 rng(43);
        const auto model = random_stable_model(rng, 2, 1, 1);
        const auto data = white_data(model, 20, 43, 0.0);
        PipelineOptions opt;
        opt.horizon = 25;
        try {
            identify_pipeline(data, {}, opt);
            FAIL("expected an error");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("regression") != std::string::npos);
        }
        const std::vector<PriorSpec> bad{prior::DcGain{{1, 1}, 1.0}, prior::DcGain{{1, 1}, 2.0}};
        opt.horizon = 5;
        CHECK_THROWS_AS(identify_pipeline(data, bad, opt), InfeasibleError);
    }
}
