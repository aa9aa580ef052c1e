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
#include "priorid/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "overloaded.hpp"
#include "priorid/errors.hpp"

namespace priorid {

namespace {

using detail::overloaded;

void require_positive(double value, const char* name) {
    if (!(std::isfinite(value) && value > 0.0)) {
        std::ostringstream os;
        os << name << " must be positive and finite, got " << value;
        throw InputError(os.str());
    }
}

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw InputError(std::string(name) + " must be finite");
    }
}

StateSpaceModel scalar_model(double a, double b, double Ts) {
    return StateSpaceModel(Eigen::MatrixXd::Constant(1, 1, a), Eigen::MatrixXd::Constant(1, 1, b),
                           Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Zero(1, 1), Ts);
}

SecondOrderCoeffs integrator_first_order_coeffs(const IntegratorFirstOrder& g, double Ts) {
    const double a = std::exp(-Ts / g.tau);
    const double lag = g.tau * (1.0 - a);
    return {g.gain * (Ts - lag), g.gain * (lag - Ts * a), -1.0 - a, a, Ts};
}

SecondOrderCoeffs two_time_constants_coeffs(const TwoTimeConstants& g, double Ts) {
    const double a1 = std::exp(-Ts / g.tau1);
    const double a2 = std::exp(-Ts / g.tau2);
    const double gap = g.tau1 - g.tau2;
    const double beta1 = g.gain * (g.tau1 * (1.0 - a1) - g.tau2 * (1.0 - a2)) / gap;
    const double beta0 = g.gain * a1 * a2 - g.gain * (g.tau1 * a2 - g.tau2 * a1) / gap;
    return {beta1, beta0, -a1 - a2, a1 * a2, Ts};
}

// The numerator is scaled by K and beta0 carries the xi / sqrt(1 - xi^2)
// factor on the sine term; together these make the DC gain exactly K.
SecondOrderCoeffs second_order_osc_coeffs(const SecondOrderOsc& g, double Ts) {
    const double xi = g.damping;
    const double root = std::sqrt(1.0 - xi * xi);
    const double wp = g.natural_frequency * root;
    const double decay = std::exp(-xi * g.natural_frequency * Ts);
    const double c = std::cos(wp * Ts);
    const double s = std::sin(wp * Ts);
    const double r = xi / root;
    const double beta1 = g.gain * (1.0 - decay * (c + r * s));
    const double beta0 = g.gain * (decay * decay + decay * (r * s - c));
    return {beta1, beta0, -2.0 * decay * c, decay * decay, Ts};
}

} // namespace

void validate(const PrototypeModel& proto) {
    std::visit(overloaded{
                   [](const Integrator& g) { require_finite(g.gain, "gain K"); },
                   [](const FirstOrder& g) {
                       require_finite(g.gain, "gain K");
                       require_positive(g.tau, "time constant tau");
                   },
                   [](const IntegratorFirstOrder& g) {
                       require_finite(g.gain, "gain K");
                       require_positive(g.tau, "time constant tau");
                   },
                   [](const TwoTimeConstants& g) {
                       require_finite(g.gain, "gain K");
                       require_positive(g.tau1, "time constant tau1");
                       require_positive(g.tau2, "time constant tau2");
                       if (std::abs(g.tau1 - g.tau2) / std::max(g.tau1, g.tau2) <=
                           kMinTimeConstantGap) {
                           throw InputError(
                               "two-time-constant model needs distinct time constants "
                               "(tau1 == tau2 is not supported)");
                       }
                   },
                   [](const SecondOrderOsc& g) {
                       require_finite(g.gain, "gain K");
                       require_positive(g.natural_frequency, "natural frequency w0");
                       if (!(g.damping > 0.0 && g.damping < 1.0)) {
                           std::ostringstream os;
                           os << "damping ratio must lie strictly inside (0, 1), got " << g.damping;
                           throw InputError(os.str());
                       }
                   },
               },
               proto);
}

std::string prototype_name(const PrototypeModel& proto) {
    return std::visit(overloaded{
                          [](const Integrator&) { return std::string("integrator"); },
                          [](const FirstOrder&) { return std::string("first_order"); },
                          [](const IntegratorFirstOrder&) {
                              return std::string("integrator_first_order");
                          },
                          [](const TwoTimeConstants&) { return std::string("two_time_constants"); },
                          [](const SecondOrderOsc&) { return std::string("second_order"); },
                      },
                      proto);
}

StateSpaceModel zoh_first_order(double gain, double tau, double Ts) {
    require_finite(gain, "gain K");
    require_positive(tau, "time constant tau");
    require_positive(Ts, "sampling period Ts");
    const double a = std::exp(-Ts / tau);
    return scalar_model(a, gain * (1.0 - a), Ts);
}

StateSpaceModel zoh_integrator(double gain, double Ts) {
    require_finite(gain, "gain K");
    require_positive(Ts, "sampling period Ts");
    return scalar_model(1.0, gain * Ts, Ts);
}

SecondOrderCoeffs zoh_second_order(const PrototypeModel& proto, double Ts) {
    require_positive(Ts, "sampling period Ts");
    validate(proto);
    return std::visit(overloaded{
                          [Ts](const IntegratorFirstOrder& g) {
                              return integrator_first_order_coeffs(g, Ts);
                          },
                          [Ts](const TwoTimeConstants& g) {
                              return two_time_constants_coeffs(g, Ts);
                          },
                          [Ts](const SecondOrderOsc& g) { return second_order_osc_coeffs(g, Ts); },
                          [](const auto& g) -> SecondOrderCoeffs {
                              throw InputError("prototype '" + prototype_name(g) +
                                               "' is not a second-order model");
                          },
                      },
                      proto);
}

StateSpaceModel controller_form(const SecondOrderCoeffs& coeffs) {
    Eigen::MatrixXd A(2, 2);
    A << -coeffs.alpha1, -coeffs.alpha0, 1.0, 0.0;
    Eigen::MatrixXd B(2, 1);
    B << 1.0, 0.0;
    Eigen::MatrixXd C(1, 2);
    C << coeffs.beta1, coeffs.beta0;
    return StateSpaceModel(std::move(A), std::move(B), std::move(C), Eigen::MatrixXd::Zero(1, 1),
                           coeffs.Ts);
}

StateSpaceModel discretize(const PrototypeModel& proto, double Ts) {
    validate(proto);
    return std::visit(overloaded{
                          [Ts](const Integrator& g) { return zoh_integrator(g.gain, Ts); },
                          [Ts](const FirstOrder& g) { return zoh_first_order(g.gain, g.tau, Ts); },
                          [&proto, Ts](const auto&) {
                              return controller_form(zoh_second_order(proto, Ts));
                          },
                      },
                      proto);
}

MarkovSequence prototype_markov(const PrototypeModel& proto, double Ts, int horizon) {
    require_positive(Ts, "sampling period Ts");
    if (horizon < 0) {
        throw InputError("horizon must be nonnegative, got " + std::to_string(horizon));
    }
    validate(proto);

    std::vector<double> m(static_cast<std::size_t>(horizon) + 1, 0.0);
    std::visit(overloaded{
                   [&](const Integrator& g) {
                       for (int k = 1; k <= horizon; ++k) {
                           m[k] = g.gain * Ts;
                       }
                   },
                   [&](const FirstOrder& g) {
                       const double a = std::exp(-Ts / g.tau);
                       if (horizon >= 1) {
                           m[1] = g.gain * (1.0 - a);
                       }
                       for (int k = 2; k <= horizon; ++k) {
                           m[k] = a * m[k - 1];
                       }
                   },
                   [&](const auto&) {
                       const auto c = zoh_second_order(proto, Ts);
                       if (horizon >= 1) {
                           m[1] = c.beta1;
                       }
                       if (horizon >= 2) {
                           m[2] = c.beta0 - c.alpha1 * c.beta1;
                       }
                       for (int k = 3; k <= horizon; ++k) {
                           m[k] = -c.alpha1 * m[k - 1] - c.alpha0 * m[k - 2];
                       }
                   },
               },
               proto);

    std::vector<Eigen::MatrixXd> blocks;
    blocks.reserve(m.size());
    for (double v : m) {
        blocks.push_back(Eigen::MatrixXd::Constant(1, 1, v));
    }
    return MarkovSequence(std::move(blocks), Ts);
}

} // namespace priorid
