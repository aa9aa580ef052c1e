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
#include "priorid/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "overloaded.hpp"
#include "priorid/errors.hpp"

namespace priorid {

using detail::overloaded;

MarkovIndexing::MarkovIndexing(Eigen::Index outputs, Eigen::Index inputs, int horizon)
    : outputs_(outputs), inputs_(inputs), horizon_(horizon) {
    if (outputs_ < 1 || inputs_ < 1 || horizon_ < 0) {
        std::ostringstream os;
        os << "invalid Markov indexing n_y=" << outputs_ << " n_u=" << inputs_
           << " horizon=" << horizon_;
        throw InputError(os.str());
    }
}

void MarkovIndexing::check(Channel ch) const {
    if (ch.output < 1 || ch.output > outputs_ || ch.input < 1 || ch.input > inputs_) {
        std::ostringstream os;
        os << "channel (" << ch.output << "," << ch.input << ") outside the " << outputs_ << "x"
           << inputs_ << " output/input range";
        throw InputError(os.str());
    }
}

Eigen::Index MarkovIndexing::index(int lag, int output, int input) const {
    return static_cast<Eigen::Index>(lag) * block_size() + (input - 1) * outputs_ + (output - 1);
}

Eigen::VectorXd MarkovIndexing::vec(const MarkovSequence& markov) const {
    if (markov.outputs() != outputs_ || markov.inputs() != inputs_ ||
        markov.horizon() != horizon_) {
        std::ostringstream os;
        os << "Markov sequence " << markov.outputs() << "x" << markov.inputs() << " with horizon "
           << markov.horizon() << " does not match indexing " << outputs_ << "x" << inputs_
           << " with horizon " << horizon_;
        throw InputError(os.str());
    }
    Eigen::VectorXd m(size());
    for (int k = 0; k <= horizon_; ++k) {
        m.segment(k * block_size(), block_size()) = markov[k].reshaped();
    }
    return m;
}

MarkovSequence MarkovIndexing::unvec(const Eigen::VectorXd& m, double Ts) const {
    if (m.size() != size()) {
        throw InputError("parameter vector has length " + std::to_string(m.size()) +
                         ", expected " + std::to_string(size()));
    }
    std::vector<Eigen::MatrixXd> blocks;
    blocks.reserve(static_cast<std::size_t>(horizon_) + 1);
    for (int k = 0; k <= horizon_; ++k) {
        blocks.push_back(m.segment(k * block_size(), block_size()).reshaped(outputs_, inputs_));
    }
    return MarkovSequence(std::move(blocks), Ts);
}

namespace {

std::string channel_text(Channel ch) {
    return "(" + std::to_string(ch.output) + "," + std::to_string(ch.input) + ")";
}

struct Row {
    std::vector<std::pair<Eigen::Index, double>> entries;
    double rhs = 0.0;
};

class RowBuilder {
public:
    RowBuilder(const MarkovIndexing& indexing, double Ts) : ix_(indexing), Ts_(Ts) {}

    std::vector<Row> rows;
    std::vector<std::string> warnings;

    void operator()(const prior::DcGain& p) {
        ix_.check(p.channel);
        rows.push_back(channel_sum(p.channel, 1.0, p.value));
    }

    void operator()(const prior::DcGainMatrix& p) {
        if (p.gains.rows() != ix_.outputs() || p.gains.cols() != ix_.inputs()) {
            std::ostringstream os;
            os << "DC gain matrix is " << p.gains.rows() << "x" << p.gains.cols() << ", expected "
               << ix_.outputs() << "x" << ix_.inputs();
            throw InputError(os.str());
        }
        for (int j = 1; j <= ix_.inputs(); ++j) {
            for (int i = 1; i <= ix_.outputs(); ++i) {
                rows.push_back(channel_sum({i, j}, 1.0, p.gains(i - 1, j - 1)));
            }
        }
    }

    void operator()(const prior::GainRatio& p) {
        ix_.check(p.numerator);
        ix_.check(p.denominator);
        require_finite(p.ratio, "gain ratio");
        if (p.numerator == p.denominator && p.ratio == 1.0) {
            throw InputError("gain ratio of a channel with itself equal to 1 gives an empty row");
        }
        Row row;
        for (int k = 0; k <= ix_.horizon(); ++k) {
            add(row, ix_.index(k, p.numerator), 1.0);
            add(row, ix_.index(k, p.denominator), -p.ratio);
        }
        rows.push_back(std::move(row));
    }

    void operator()(const prior::FirstOrderDecay& p) {
        ix_.check(p.channel);
        if (!(std::isfinite(p.tau) && p.tau > 0.0)) {
            throw InputError("first-order prior needs a positive time constant");
        }
        const double a = std::exp(-Ts_ / p.tau);
        rows.push_back(pin(0, p.channel, 0.0));
        if (p.gain && ix_.horizon() >= 1) {
            require_finite(*p.gain, "gain K");
            rows.push_back(pin(1, p.channel, *p.gain * (1.0 - a)));
        }
        recurrence(p.channel, 2, {-a});
        if (ix_.horizon() < 2) {
            warnings.push_back("first-order prior on " + channel_text(p.channel) +
                               ": horizon too short for the decay recurrence");
        }
    }

    void operator()(const prior::IntegratorChannel& p) {
        ix_.check(p.channel);
        rows.push_back(pin(0, p.channel, 0.0));
        if (p.gain && ix_.horizon() >= 1) {
            require_finite(*p.gain, "gain K");
            rows.push_back(pin(1, p.channel, *p.gain * Ts_));
        }
        recurrence(p.channel, 2, {-1.0});
        if (ix_.horizon() < 2) {
            warnings.push_back("integrator prior on " + channel_text(p.channel) +
                               ": horizon too short for the constant-step recurrence");
        }
    }

    void operator()(const prior::SecondOrderRecurrence& p) {
        ix_.check(p.channel);
        require_finite(p.alpha1, "alpha1");
        require_finite(p.alpha0, "alpha0");
        rows.push_back(pin(0, p.channel, 0.0));
        if (p.seed) {
            require_finite(p.seed->beta1, "beta1");
            require_finite(p.seed->beta0, "beta0");
            if (ix_.horizon() >= 1) {
                rows.push_back(pin(1, p.channel, p.seed->beta1));
            }
            if (ix_.horizon() >= 2) {
                rows.push_back(pin(2, p.channel, p.seed->beta0 - p.alpha1 * p.seed->beta1));
            }
        }
        recurrence(p.channel, 3, {p.alpha1, p.alpha0});
        if (ix_.horizon() < 3) {
            warnings.push_back("second-order prior on " + channel_text(p.channel) +
                               ": horizon too short for the two-term recurrence");
        }
    }

    void operator()(const prior::ZeroChannel& p) {
        ix_.check(p.channel);
        for (int k = 0; k <= ix_.horizon(); ++k) {
            rows.push_back(pin(k, p.channel, 0.0));
        }
    }

private:
    static void require_finite(double v, const char* name) {
        if (!std::isfinite(v)) {
            throw InputError(std::string(name) + " must be finite");
        }
    }

    static void add(Row& row, Eigen::Index col, double value) {
        for (auto& [c, v] : row.entries) {
            if (c == col) {
                v += value;
                return;
            }
        }
        row.entries.emplace_back(col, value);
    }

    Row channel_sum(Channel ch, double scale, double rhs) const {
        Row row;
        for (int k = 0; k <= ix_.horizon(); ++k) {
            add(row, ix_.index(k, ch), scale);
        }
        row.rhs = rhs;
        return row;
    }

    Row pin(int lag, Channel ch, double value) const {
        Row row;
        add(row, ix_.index(lag, ch), 1.0);
        row.rhs = value;
        return row;
    }

    // Rows m_k + c_1 m_{k-1} + c_2 m_{k-2} + ... = 0 for k = first..horizon.
    void recurrence(Channel ch, int first, std::initializer_list<double> coeffs) {
        for (int k = first; k <= ix_.horizon(); ++k) {
            Row row;
            add(row, ix_.index(k, ch), 1.0);
            int lag = k - 1;
            for (double c : coeffs) {
                add(row, ix_.index(lag--, ch), c);
            }
            rows.push_back(std::move(row));
        }
    }

    const MarkovIndexing& ix_;
    double Ts_;
};

Eigen::Index numerical_rank(const Eigen::MatrixXd& M) {
    if (M.size() == 0) {
        return 0;
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    const double tol = sv(0) * static_cast<double>(std::max(M.rows(), M.cols())) *
                       std::numeric_limits<double>::epsilon();
    return (sv.array() > tol).count();
}

} // namespace

std::string describe(const PriorSpec& spec) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const prior::DcGain& p) {
                       os << "dc_gain" << channel_text(p.channel) << " = " << p.value;
                   },
                   [&](const prior::DcGainMatrix& p) {
                       os << "dc_gain_matrix " << p.gains.rows() << "x" << p.gains.cols();
                   },
                   [&](const prior::GainRatio& p) {
                       os << "gain_ratio" << channel_text(p.numerator) << "/"
                          << channel_text(p.denominator) << " = " << p.ratio;
                   },
                   [&](const prior::FirstOrderDecay& p) {
                       os << "first_order" << channel_text(p.channel) << " tau=" << p.tau;
                       if (p.gain) {
                           os << " K=" << *p.gain;
                       }
                   },
                   [&](const prior::IntegratorChannel& p) {
                       os << "integrator" << channel_text(p.channel);
                       if (p.gain) {
                           os << " K=" << *p.gain;
                       }
                   },
                   [&](const prior::SecondOrderRecurrence& p) {
                       os << "second_order" << channel_text(p.channel) << " a1=" << p.alpha1
                          << " a0=" << p.alpha0;
                       if (p.seed) {
                           os << " b1=" << p.seed->beta1 << " b0=" << p.seed->beta0;
                       }
                   },
                   [&](const prior::ZeroChannel& p) {
                       os << "zero_channel" << channel_text(p.channel);
                   },
               },
               spec);
    return os.str();
}

EqualityConstraintSet compile(std::span<const PriorSpec> priors, const MarkovIndexing& indexing,
                              double Ts) {
    if (!(std::isfinite(Ts) && Ts > 0.0)) {
        throw InputError("sampling period must be positive");
    }

    std::vector<Row> rows;
    std::vector<std::string> provenance;
    std::vector<std::size_t> source;
    std::vector<std::string> warnings;
    for (std::size_t p = 0; p < priors.size(); ++p) {
        RowBuilder builder(indexing, Ts);
        std::visit(builder, priors[p]);
        const std::string tag = describe(priors[p]);
        for (auto& row : builder.rows) {
            rows.push_back(std::move(row));
            provenance.push_back(tag);
            source.push_back(p);
        }
        for (auto& w : builder.warnings) {
            warnings.push_back(std::move(w));
        }
    }

    EqualityConstraintSet cs{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                                   indexing.size()),
                             Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows.size())),
                             indexing,
                             std::move(provenance),
                             std::move(source),
                             std::move(warnings)};
    for (Eigen::Index r = 0; r < cs.rows(); ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        for (const auto& [col, value] : row.entries) {
            cs.A_eq(r, col) = value;
        }
        cs.b_eq(r) = row.rhs;
        if (cs.A_eq.row(r).isZero(0.0)) {
            throw InputError("prior '" + cs.provenance[static_cast<std::size_t>(r)] +
                             "' produced an all-zero constraint row");
        }
    }
    return cs;
}

ConsistencyReport check_consistency(const EqualityConstraintSet& cs) {
    ConsistencyReport report;
    if (cs.empty()) {
        return report;
    }
    report.rank = numerical_rank(cs.A_eq);

    Eigen::MatrixXd augmented(cs.rows(), cs.A_eq.cols() + 1);
    augmented << cs.A_eq, cs.b_eq;
    report.infeasible = numerical_rank(augmented) > report.rank;

    // Column pivoting on A_eq^T picks a maximal independent set of rows; the
    // rest are redundant.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(cs.A_eq.transpose());
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index r = report.rank; r < perm.size(); ++r) {
        report.redundant_rows.push_back(perm(r));
    }
    std::sort(report.redundant_rows.begin(), report.redundant_rows.end());
    return report;
}

double constraint_residual(const EqualityConstraintSet& cs, const Eigen::VectorXd& m) {
    if (m.size() != cs.A_eq.cols()) {
        throw InputError("parameter vector has length " + std::to_string(m.size()) +
                         ", constraints expect " + std::to_string(cs.A_eq.cols()));
    }
    if (cs.empty()) {
        return 0.0;
    }
    return (cs.A_eq * m - cs.b_eq).norm();
}

double constraint_residual(const EqualityConstraintSet& cs, const MarkovSequence& markov) {
    return constraint_residual(cs, cs.indexing.vec(markov));
}

} // namespace priorid
