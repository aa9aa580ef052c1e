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
#ifndef PRIORID_PRIORS_HPP
#define PRIORID_PRIORS_HPP

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "priorid/statespace.hpp"

namespace priorid {

/// Input-output couple addressing entry (output, input) of each Markov
/// block. Both indices are 1-based.
struct Channel {
    int output = 1;
    int input = 1;

    friend bool operator==(const Channel&, const Channel&) = default;
};

/**
 * Vectorization of a Markov sequence into the stacked parameter vector m.
 *
 * Lag-major, then input column, then output row:
 *   index(k, i, j) = k n_y n_u + (j - 1) n_y + (i - 1)
 * with 1-based output i and input j. Each lag occupies a contiguous slice
 * equal to the column-major storage of M_k.
 */
class MarkovIndexing {
public:
    MarkovIndexing(Eigen::Index outputs, Eigen::Index inputs, int horizon);

    Eigen::Index outputs() const { return outputs_; }
    Eigen::Index inputs() const { return inputs_; }
    int horizon() const { return horizon_; }

    /// Number of entries per lag, n_y n_u.
    Eigen::Index block_size() const { return outputs_ * inputs_; }
    /// Length of m, (l + 1) n_y n_u.
    Eigen::Index size() const { return block_size() * (horizon_ + 1); }

    Eigen::Index index(int lag, int output, int input) const;
    Eigen::Index index(int lag, Channel ch) const { return index(lag, ch.output, ch.input); }

    /// Throws InputError when the channel lies outside n_y x n_u.
    void check(Channel ch) const;

    Eigen::VectorXd vec(const MarkovSequence& markov) const;
    MarkovSequence unvec(const Eigen::VectorXd& m, double Ts) const;

    friend bool operator==(const MarkovIndexing&, const MarkovIndexing&) = default;

private:
    Eigen::Index outputs_;
    Eigen::Index inputs_;
    int horizon_;
};

namespace prior {

/// sum_k M_k(i, j) = value
struct DcGain {
    Channel channel;
    double value = 0.0;
};

/// sum_k M_k = gains, one row per entry.
struct DcGainMatrix {
    Eigen::MatrixXd gains;
};

/// sum_k M_k(numerator) = ratio * sum_k M_k(denominator)
struct GainRatio {
    Channel numerator;
    Channel denominator;
    double ratio = 1.0;
};

/// First-order channel with known time constant: M_0 = 0 and
/// M_k = e^{-Ts/tau} M_{k-1} for k >= 2. With a gain, also M_1 = K (1 - e^{-Ts/tau}).
struct FirstOrderDecay {
    Channel channel;
    double tau = 1.0;
    std::optional<double> gain;
};

/// Integrating channel: M_0 = 0 and M_k = M_{k-1} for k >= 2. With a gain,
/// also M_1 = K Ts.
struct IntegratorChannel {
    Channel channel;
    std::optional<double> gain;
};

/// Numerator seed (beta1, beta0) of a second-order channel.
struct SecondOrderSeed {
    double beta1 = 0.0;
    double beta0 = 0.0;
};

/// Second-order channel: M_0 = 0 and M_k + a1 M_{k-1} + a0 M_{k-2} = 0 for
/// k >= 3. With a seed, also M_1 = beta1 and M_2 = beta0 - a1 beta1.
struct SecondOrderRecurrence {
    Channel channel;
    double alpha1 = 0.0;
    double alpha0 = 0.0;
    std::optional<SecondOrderSeed> seed;
};

/// M_k(i, j) = 0 for every lag.
struct ZeroChannel {
    Channel channel;
};

} // namespace prior

using PriorSpec = std::variant<prior::DcGain, prior::DcGainMatrix, prior::GainRatio,
                               prior::FirstOrderDecay, prior::IntegratorChannel,
                               prior::SecondOrderRecurrence, prior::ZeroChannel>;

/// Human-readable one-line description, used as the provenance tag.
std::string describe(const PriorSpec& spec);

/// Linear equality constraints A_eq m = b_eq on the stacked Markov vector.
struct EqualityConstraintSet {
    Eigen::MatrixXd A_eq;
    Eigen::VectorXd b_eq;
    MarkovIndexing indexing;
    /// Per row: describe() of the originating prior.
    std::vector<std::string> provenance;
    /// Per row: position of the originating prior in the declaration list.
    std::vector<std::size_t> source;
    /// Non-fatal remarks, e.g. a recurrence that the horizon is too short for.
    std::vector<std::string> warnings;

    Eigen::Index rows() const { return A_eq.rows(); }
    bool empty() const { return A_eq.rows() == 0; }
};

/**
 * Expands each prior into constraint rows, stacked in declaration order.
 * Ts is the sampling period used by the first-order and integrator forms.
 * Throws InputError for out-of-range channels, nonpositive tau or Ts, and
 * priors that would produce an all-zero row.
 */
EqualityConstraintSet compile(std::span<const PriorSpec> priors, const MarkovIndexing& indexing,
                              double Ts);

struct ConsistencyReport {
    Eigen::Index rank = 0;
    /// Rows not needed to span the row space of A_eq, ascending.
    std::vector<Eigen::Index> redundant_rows;
    bool infeasible = false;
};

/**
 * Rank diagnostics with tolerance sigma_max max(r, cols) eps. The set is
 * infeasible when appending b_eq raises the rank.
 */
ConsistencyReport check_consistency(const EqualityConstraintSet& cs);

/// || A_eq vec(markov) - b_eq ||_2
double constraint_residual(const EqualityConstraintSet& cs, const MarkovSequence& markov);

/// Same as above for an already stacked parameter vector.
double constraint_residual(const EqualityConstraintSet& cs, const Eigen::VectorXd& m);

} // namespace priorid

#endif // PRIORID_PRIORS_HPP
