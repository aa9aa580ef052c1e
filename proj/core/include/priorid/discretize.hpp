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
#ifndef PRIORID_DISCRETIZE_HPP
#define PRIORID_DISCRETIZE_HPP

#include <string>
#include <variant>

#include "priorid/statespace.hpp"

namespace priorid {

// Continuous-time prototype models, all without dead time.

/// K / s
struct Integrator {
    double gain = 1.0;
};

/// K / (1 + tau s)
struct FirstOrder {
    double gain = 1.0;
    double tau = 1.0;
};

/// K / (s (1 + tau s))
struct IntegratorFirstOrder {
    double gain = 1.0;
    double tau = 1.0;
};

/// K / ((1 + tau1 s)(1 + tau2 s)), tau1 != tau2
struct TwoTimeConstants {
    double gain = 1.0;
    double tau1 = 1.0;
    double tau2 = 2.0;
};

/// K w0^2 / (s^2 + 2 xi w0 s + w0^2), 0 < xi < 1
struct SecondOrderOsc {
    double gain = 1.0;
    double natural_frequency = 1.0;
    double damping = 0.5;
};

using PrototypeModel =
    std::variant<Integrator, FirstOrder, IntegratorFirstOrder, TwoTimeConstants, SecondOrderOsc>;

/// Throws InputError when the prototype's parameters are out of range.
void validate(const PrototypeModel& proto);

/// Short name: "integrator", "first_order", ...
std::string prototype_name(const PrototypeModel& proto);

/// Coefficients of (beta1 z + beta0) / (z^2 + alpha1 z + alpha0).
struct SecondOrderCoeffs {
    double beta1 = 0.0;
    double beta0 = 0.0;
    double alpha1 = 0.0;
    double alpha0 = 0.0;
    double Ts = 1.0;
};

/// Relative gap |tau1 - tau2| / max(tau1, tau2) below which two time
/// constants are considered equal.
inline constexpr double kMinTimeConstantGap = 1e-8;

/// ZOH of K / (1 + tau s): A = e^{-Ts/tau}, B = K (1 - A), C = 1, D = 0.
StateSpaceModel zoh_first_order(double gain, double tau, double Ts);

/// ZOH of K / s: A = 1, B = K Ts, C = 1, D = 0.
StateSpaceModel zoh_integrator(double gain, double Ts);

/**
 * ZOH transfer-function coefficients of the second-order prototypes
 * (IntegratorFirstOrder, TwoTimeConstants, SecondOrderOsc). Both numerator
 * coefficients carry the gain K, so the DC gain of the stable variants is K.
 */
SecondOrderCoeffs zoh_second_order(const PrototypeModel& proto, double Ts);

/// Controller canonical form: A = [[-a1, -a0], [1, 0]], B = e1, C = [b1, b0].
StateSpaceModel controller_form(const SecondOrderCoeffs& coeffs);

/// State-space form of any prototype, through the constructors above.
StateSpaceModel discretize(const PrototypeModel& proto, double Ts);

/**
 * Markov sequence of a prototype generated by its scalar recurrence:
 * geometric decay for FirstOrder, constant for Integrator, and the
 * two-term recurrence M_k = -a1 M_{k-1} - a0 M_{k-2} for the rest.
 */
MarkovSequence prototype_markov(const PrototypeModel& proto, double Ts, int horizon);

} // namespace priorid

#endif // PRIORID_DISCRETIZE_HPP
