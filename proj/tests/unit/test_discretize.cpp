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

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "priorid/discretize.hpp"
#include "priorid/errors.hpp"

using namespace priorid;
using priorid::testing::uniform;

namespace {

// e^{-0.1}, K (1 - e^{-0.1}) for K = 2, and the next two Markov terms,
// evaluated with Python's math.exp.
constexpr double kA = 0.9048374180359595;
constexpr double kB = 0.19032516392808096;
constexpr double kM2 = 0.17221332991595553;
constexpr double kM3 = 0.15582506479252806;

PrototypeModel random_prototype(std::mt19937_64& rng, int kind) {
    const double K = uniform(rng, -3.0, 3.0);
    switch (kind) {
    case 0:
        return Integrator{K};
    case 1:
        return FirstOrder{K, uniform(rng, 0.2, 20.0)};
    case 2:
        return IntegratorFirstOrder{K, uniform(rng, 0.2, 20.0)};
    case 3: {
        const double t1 = uniform(rng, 0.2, 20.0);
        double t2 = uniform(rng, 0.2, 20.0);
        if (std::abs(t1 - t2) < 0.05) {
            t2 = t1 + 0.5;
        }
        return TwoTimeConstants{K, t1, t2};
    }
    default:
        return SecondOrderOsc{K, uniform(rng, 0.1, 3.0), uniform(rng, 0.05, 0.95)};
    }
}

} // namespace

TEST_CASE("zoh_first_order") {
    const auto m = zoh_first_order(2.0, 10.0, 1.0);
    CHECK(m.A()(0, 0) == doctest::Approx(kA).epsilon(1e-14));
    CHECK(m.B()(0, 0) == doctest::Approx(kB).epsilon(1e-14));
    CHECK(m.C()(0, 0) == 1.0);
    CHECK(m.D()(0, 0) == 0.0);

    const auto half = zoh_first_order(3.0, 1.0 / std::log(2.0), 1.0);
    CHECK(half.A()(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(half.B()(0, 0) == doctest::Approx(1.5).epsilon(1e-14));

    for (double tau : {0.3, 1.0, 7.0}) {
        CHECK(dc_gain(zoh_first_order(1.0, tau, 0.2))(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(zoh_first_order(1.0, 0.0, 1.0), InputError);
    CHECK_THROWS_AS(zoh_first_order(1.0, -1.0, 1.0), InputError);
    CHECK_THROWS_AS(zoh_first_order(1.0, 1.0, 0.0), InputError);
}

TEST_CASE("zoh_integrator") {
    const auto m = markov_sequence(zoh_integrator(3.0, 0.5), 5);
    CHECK(m[0](0, 0) == 0.0);
    for (int k = 1; k <= 5; ++k) {
        CHECK(m[k](0, 0) == 1.5);
    }
    CHECK(markov_sequence(zoh_integrator(0.0, 0.5), 4).sum().isZero(0.0));

    // Unit step gives the ramp K Ts (0, 1, 2, ...).
    const Eigen::MatrixXd Y = simulate(zoh_integrator(3.0, 0.5), Eigen::MatrixXd::Ones(6, 1));
    for (int t = 0; t < 6; ++t) {
        CHECK(Y(t, 0) == doctest::Approx(1.5 * t));
    }
    CHECK_THROWS_AS(zoh_integrator(1.0, -0.1), InputError);
}

TEST_CASE("zoh_second_order coefficients") {
    SUBCASE("integrator plus first order, tau = 10, Ts = 1") {
        const auto c = zoh_second_order(IntegratorFirstOrder{1.0, 10.0}, 1.0);
        CHECK(c.alpha1 == doctest::Approx(-1.0 - kA).epsilon(1e-14));
        CHECK(c.alpha0 == doctest::Approx(kA).epsilon(1e-14));
    }
    SUBCASE("oscillator alpha0 = e^{-0.5}") {
        const auto c = zoh_second_order(SecondOrderOsc{1.0, 1.0, 0.5}, 0.5);
        CHECK(c.alpha0 == doctest::Approx(0.6065306597126334).epsilon(1e-14));
    }
    SUBCASE("equal time constants rejected") {
        CHECK_THROWS_AS(zoh_second_order(TwoTimeConstants{1.0, 2.0, 2.0}, 0.1), InputError);
        CHECK_THROWS_AS(zoh_second_order(TwoTimeConstants{1.0, 2.0, 2.0 * (1 + 1e-10)}, 0.1),
                        InputError);
        CHECK_NOTHROW(zoh_second_order(TwoTimeConstants{1.0, 2.0, 2.0 * (1 + 1e-6)}, 0.1));
    }
    SUBCASE("damping outside (0, 1) rejected") {
        CHECK_THROWS_AS(zoh_second_order(SecondOrderOsc{1.0, 1.0, 1.0}, 0.1), InputError);
        CHECK_THROWS_AS(zoh_second_order(SecondOrderOsc{1.0, 1.0, 0.0}, 0.1), InputError);
        CHECK_THROWS_AS(zoh_second_order(SecondOrderOsc{1.0, -1.0, 0.5}, 0.1), InputError);
    }
    SUBCASE("first-order prototypes are not second order") {
        CHECK_THROWS_AS(zoh_second_order(FirstOrder{1.0, 1.0}, 0.1), InputError);
        CHECK_THROWS_AS(zoh_second_order(Integrator{1.0}, 0.1), InputError);
    }
    SUBCASE("two time constants are symmetric") {
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 50; ++trial) {
            const double K = uniform(rng, -2, 2), t1 = uniform(rng, 0.1, 30), t2 = uniform(rng, 0.1, 30);
            const double Ts = uniform(rng, 0.05, 2.0);
            const auto a = zoh_second_order(TwoTimeConstants{K, t1, t2}, Ts);
            const auto b = zoh_second_order(TwoTimeConstants{K, t2, t1}, Ts);
            CHECK(std::abs(a.beta1 - b.beta1) <= 1e-12);
            CHECK(std::abs(a.beta0 - b.beta0) <= 1e-12);
            CHECK(std::abs(a.alpha1 - b.alpha1) <= 1e-12);
            CHECK(std::abs(a.alpha0 - b.alpha0) <= 1e-12);
        }
    }
}

TEST_CASE("controller_form") {
    SUBCASE("nilpotent A when alphas vanish") {
        const auto m = controller_form({0.7, -0.2, 0.0, 0.0, 1.0});
        Eigen::MatrixXd expected(2, 2);
        expected << 0, 0, 1, 0;
        CHECK(m.A() == expected);
        const auto seq = markov_sequence(m, 5);
        CHECK(seq[0](0, 0) == 0.0);
        CHECK(seq[1](0, 0) == 0.7);
        CHECK(seq[2](0, 0) == -0.2);
        CHECK(seq[3](0, 0) == 0.0);
        CHECK(seq[5](0, 0) == 0.0);
    }
    SUBCASE("first two Markov terms") {
        const SecondOrderCoeffs c{0.3, 0.2, -1.1, 0.4, 0.5};
        const auto seq = markov_sequence(controller_form(c), 2);
        CHECK(seq[1](0, 0) == doctest::Approx(c.beta1));
        CHECK(seq[2](0, 0) == doctest::Approx(c.beta0 - c.alpha1 * c.beta1));
    }
    SUBCASE("two-term recurrence on the computed sequence") {
        const auto c = zoh_second_order(IntegratorFirstOrder{1.0, 10.0}, 1.0);
        const auto seq = markov_sequence(controller_form(c), 40);
        for (int k = 3; k <= 40; ++k) {
            const double predicted = -c.alpha1 * seq[k - 1](0, 0) - c.alpha0 * seq[k - 2](0, 0);
            CHECK(std::abs(seq[k](0, 0) - predicted) <= 1e-12);
        }
    }
    SUBCASE("oscillator poles have modulus e^{-xi w0 Ts}") {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 30; ++trial) {
            const SecondOrderOsc g{1.0, uniform(rng, 0.1, 3.0), uniform(rng, 0.05, 0.95)};
            const double Ts = uniform(rng, 0.05, 1.0);
            const auto A = controller_form(zoh_second_order(g, Ts)).A();
            const Eigen::VectorXcd eig = Eigen::EigenSolver<Eigen::MatrixXd>(A).eigenvalues();
            const double expected = std::exp(-g.damping * g.natural_frequency * Ts);
            for (Eigen::Index i = 0; i < 2; ++i) {
                CHECK(std::abs(std::abs(eig(i)) - expected) <= 1e-10);
            }
        }
    }
}

TEST_CASE("prototype_markov") {
    SUBCASE("first order by hand") {
        const auto m = prototype_markov(FirstOrder{2.0, 10.0}, 1.0, 3);
        CHECK(m[0](0, 0) == 0.0);
        CHECK(m[1](0, 0) == doctest::Approx(kB).epsilon(1e-13));
        CHECK(m[2](0, 0) == doctest::Approx(kM2).epsilon(1e-13));
        CHECK(m[3](0, 0) == doctest::Approx(kM3).epsilon(1e-13));

        const auto ss = markov_sequence(zoh_first_order(2.0, 10.0, 1.0), 2);
        CHECK(ss[1](0, 0) == doctest::Approx(kB).epsilon(1e-13));
        CHECK(ss[2](0, 0) == doctest::Approx(kM2).epsilon(1e-13));
        CHECK(dc_gain(zoh_first_order(2.0, 10.0, 1.0))(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("integrator") {
        const auto m = prototype_markov(Integrator{3.0}, 0.5, 2);
        CHECK(m[0](0, 0) == 0.0);
        CHECK(m[1](0, 0) == 1.5);
        CHECK(m[2](0, 0) == 1.5);
    }
    SUBCASE("horizon zero") {
        CHECK(prototype_markov(SecondOrderOsc{1.0, 1.0, 0.5}, 0.1, 0).horizon() == 0);
    }
    SUBCASE("route equivalence with the state-space form") {
        std::mt19937_64 rng(23);
        for (int trial = 0; trial < 100; ++trial) {
            const auto proto = random_prototype(rng, trial % 5);
            const double Ts = uniform(rng, 0.05, 2.0);
            const int horizon = priorid::testing::uniform_int(rng, 0, 50);
            const auto a = prototype_markov(proto, Ts, horizon);
            const auto b = markov_sequence(discretize(proto, Ts), horizon);
            for (int k = 0; k <= horizon; ++k) {
                CHECK(std::abs(a[k](0, 0) - b[k](0, 0)) <= 1e-12 * std::max(1.0, std::abs(b[k](0, 0))));
            }
        }
    }
    SUBCASE("independent matrix-exponential ZOH oracle") {
        std::mt19937_64 rng(29);
        for (int trial = 0; trial < 100; ++trial) {
            const auto proto = random_prototype(rng, trial % 5);
            const double Ts = uniform(rng, 0.05, 2.0);
            const auto a = prototype_markov(proto, Ts, 30);
            const auto oracle = priorid::testing::zoh_markov_oracle(proto, Ts, 30);
            double scale = 0.0;
            for (double v : oracle) {
                scale = std::max(scale, std::abs(v));
            }
            for (int k = 0; k <= 30; ++k) {
                CHECK(std::abs(a[k](0, 0) - oracle[static_cast<std::size_t>(k)]) <= 1e-10 * std::max(1.0, scale));
            }
        }
    }
    SUBCASE("DC gain equals K for the stable prototypes") {
        std::mt19937_64 rng(37);
        for (int trial = 0; trial < 60; ++trial) {
            const int kind = std::array{1, 3, 4}[static_cast<std::size_t>(trial % 3)];
            const auto proto = random_prototype(rng, kind);
            const double K = std::visit([](const auto& g) { return g.gain; }, proto);
            const double Ts = uniform(rng, 0.05, 2.0);
            CHECK(std::abs(dc_gain(discretize(proto, Ts))(0, 0) - K) <= 1e-9);
        }
    }
}
