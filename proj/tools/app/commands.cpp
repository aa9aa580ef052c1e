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
#include "priorid_app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "priorid/errors.hpp"
#include "priorid_app/io.hpp"

namespace priorid::app {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Eigen::MatrixXd make_input(InputKind kind, Eigen::Index samples, Eigen::Index inputs, int channel,
                           std::mt19937_64& rng) {
    switch (kind) {
    case InputKind::impulse:
        return unit_impulse(samples, inputs, channel);
    case InputKind::step:
        return Eigen::MatrixXd::Ones(samples, inputs);
    case InputKind::prbs: {
        // One 31-bit maximal-length LFSR (x^31 + x^28 + 1) per channel.
        Eigen::MatrixXd U(samples, inputs);
        for (Eigen::Index j = 0; j < inputs; ++j) {
            std::uint32_t state = static_cast<std::uint32_t>(rng() & 0x7fffffffULL) | 1U;
            for (Eigen::Index t = 0; t < samples; ++t) {
                const std::uint32_t bit = ((state >> 30) ^ (state >> 27)) & 1U;
                state = ((state << 1) | bit) & 0x7fffffffU;
                U(t, j) = bit ? 1.0 : -1.0;
            }
        }
        return U;
    }
    case InputKind::white: {
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::MatrixXd U(samples, inputs);
        for (Eigen::Index t = 0; t < samples; ++t) {
            for (Eigen::Index j = 0; j < inputs; ++j) {
                U(t, j) = normal(rng);
            }
        }
        return U;
    }
    }
    throw InputError("unknown input kind");
}

json number_array(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v(i));
    }
    return out;
}

// One entry per prior with the first and last row it produced.
json prior_rows_json(const EqualityConstraintSet& cs) {
    json out = json::array();
    for (std::size_t r = 0; r < cs.source.size(); ++r) {
        if (r == 0 || cs.source[r] != cs.source[r - 1]) {
            out.push_back(json{{"prior", cs.provenance[r]}, {"source", cs.source[r]},
                               {"first_row", r}, {"last_row", r}});
        } else {
            out.back()["last_row"] = r;
        }
    }
    return out;
}

json consistency_json(const EqualityConstraintSet& cs, const ConsistencyReport& report) {
    return json{{"rows", cs.rows()},
                {"rank", report.rank},
                {"redundant_rows", report.redundant_rows},
                {"infeasible", report.infeasible},
                {"priors", prior_rows_json(cs)},
                {"warnings", cs.warnings}};
}

void write_json(const std::filesystem::path& path, const json& doc) {
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
}

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) {
        return std::nan("");
    }
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void tally(McTally& t, double constrained, double unconstrained) {
    if (std::abs(constrained - unconstrained) <= kTieTolerance) {
        ++t.ties;
    } else if (constrained < unconstrained) {
        ++t.wins;
    } else {
        ++t.losses;
    }
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index));
}

IdentDataset simulate_dataset(const StateSpaceModel& model, const SimulationOptions& options) {
    if (options.samples < 1) {
        throw InputError("number of samples must be positive");
    }
    std::mt19937_64 rng(options.seed);
    IdentDataset data;
    data.Ts = model.sampling_period();
    data.U = make_input(options.input, options.samples, model.inputs(), options.input_channel, rng);
    data.Y = simulate(model, data.U);

    if (options.snr_db) {
        if (!std::isfinite(*options.snr_db)) {
            throw InputError("SNR must be finite");
        }
        const double ratio = std::pow(10.0, *options.snr_db / 10.0);
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::VectorXd sigma(model.outputs());
        for (Eigen::Index i = 0; i < model.outputs(); ++i) {
            const double power = data.Y.col(i).squaredNorm() / static_cast<double>(data.Y.rows());
            if (!(power > 0.0)) {
                throw InputError("invalid SNR: noise-free output " + std::to_string(i + 1) +
                                 " is identically zero");
            }
            sigma(i) = std::sqrt(power / ratio);
        }
        for (Eigen::Index t = 0; t < data.Y.rows(); ++t) {
            for (Eigen::Index i = 0; i < data.Y.cols(); ++i) {
                data.Y(t, i) += sigma(i) * normal(rng);
            }
        }
    }
    return data;
}

StateSpaceModel generator_model(const RunConfig& cfg) {
    if (cfg.generator.model_file) {
        StateSpaceModel model = load_model(*cfg.generator.model_file);
        if (cfg.Ts && std::abs(*cfg.Ts - model.sampling_period()) > kSamplingTolerance * *cfg.Ts) {
            throw InputError("configured Ts = " + format_short(*cfg.Ts) +
                             " differs from the model file's Ts = " +
                             format_short(model.sampling_period()));
        }
        return model;
    }
    if (cfg.generator.prototype) {
        if (!cfg.Ts) {
            throw InputError("a prototype generator needs the sampling period Ts");
        }
        return discretize(*cfg.generator.prototype, *cfg.Ts);
    }
    throw InputError("no generator given (use a prototype or a model file)");
}

IdentDataset shift_inputs(const IdentDataset& data, std::span<const int> delays) {
    if (delays.empty()) {
        return data;
    }
    if (static_cast<Eigen::Index>(delays.size()) != data.inputs()) {
        throw InputError("got " + std::to_string(delays.size()) + " delays for " +
                         std::to_string(data.inputs()) + " inputs");
    }
    if (std::any_of(delays.begin(), delays.end(), [](int d) { return d < 0; })) {
        throw InputError("delays must be nonnegative");
    }
    const int max_delay = *std::max_element(delays.begin(), delays.end());
    const Eigen::Index N = data.samples() - max_delay;
    if (N < 1) {
        throw InputError("delays remove every sample of the dataset");
    }
    IdentDataset shifted;
    shifted.Ts = data.Ts;
    shifted.Y = data.Y.bottomRows(N);
    shifted.U.resize(N, data.inputs());
    for (Eigen::Index j = 0; j < data.inputs(); ++j) {
        shifted.U.col(j) = data.U.col(j).segment(max_delay - delays[static_cast<std::size_t>(j)], N);
    }
    return shifted;
}

IdentDataset run_simulate(const RunConfig& cfg) {
    if (cfg.output_file.empty()) {
        throw InputError("simulate needs an output file");
    }
    const StateSpaceModel model = generator_model(cfg);
    const IdentDataset data = simulate_dataset(
        model, SimulationOptions{cfg.input, cfg.input_channel, cfg.samples, cfg.snr_db, cfg.seed});
    auto out = open_output(cfg.output_file);
    write_dataset(out, data);
    return data;
}

PipelineOptions pipeline_options(const RunConfig& cfg) {
    PipelineOptions options;
    options.horizon = cfg.horizon;
    options.block_rows = cfg.block_rows;
    options.block_cols = cfg.block_cols;
    options.method = cfg.mode;
    options.weight = cfg.weight;
    options.order = cfg.order ? OrderSelection::exactly(*cfg.order)
                              : OrderSelection::automatic(cfg.order_tolerance);
    return options;
}

json diagnostics_json(const PipelineResult& result, const PipelineOptions& options) {
    const auto& est = result.estimate;
    const auto& real = result.realization;
    const MarkovSequence realized = markov_sequence(real.model, est.markov.horizon());

    json doc;
    doc["status"] = "ok";
    doc["method"] = to_string(est.method);
    if (est.method == EstimationMethod::weighted) {
        doc["weight"] = est.weight;
    }
    doc["horizon"] = options.horizon;
    doc["constraints"] = consistency_json(result.constraints, result.consistency);
    doc["estimate"] = json{{"residual_norm", est.residual_norm},
                           {"constraint_residual", est.constraint_residual},
                           {"rank", est.diagnostics.rank},
                           {"columns", est.diagnostics.columns},
                           {"rank_deficient", est.diagnostics.rank_deficient},
                           {"sigma_max", est.diagnostics.sigma_max},
                           {"sigma_min", est.diagnostics.sigma_min},
                           {"condition", est.diagnostics.condition},
                           {"warnings", est.diagnostics.warnings}};
    doc["realization"] = json{
        {"order", real.order},
        {"singular_values", number_array(real.singular_values)},
        {"reconstruction_error", real.reconstruction_error},
        {"spectral_radius", spectral_radius(real.model.A())},
        {"constraint_residual",
         result.constraints.empty() ? 0.0 : constraint_residual(result.constraints, realized)}};
    doc["notices"] = result.notices;
    return doc;
}

PipelineResult run_identify(const RunConfig& cfg) {
    if (cfg.dataset.empty()) {
        throw InputError("identify needs a dataset");
    }
    if (!cfg.Ts) {
        throw InputError("identify needs the sampling period Ts");
    }
    if (cfg.mode == EstimationMethod::weighted && cfg.weight && !(*cfg.weight > 0.0)) {
        throw InputError("weighted mode needs a positive weight");
    }
    const IdentDataset data = shift_inputs(load_dataset(cfg.dataset, *cfg.Ts), cfg.delays);
    const PipelineOptions options = pipeline_options(cfg);

    if (cfg.mode == EstimationMethod::exact && !cfg.priors.empty()) {
        const MarkovIndexing indexing(data.outputs(), data.inputs(), cfg.horizon);
        const auto cs = compile(cfg.priors, indexing, data.Ts);
        const auto report = check_consistency(cs);
        if (report.infeasible) {
            json doc;
            doc["status"] = "infeasible";
            doc["method"] = to_string(cfg.mode);
            doc["horizon"] = cfg.horizon;
            doc["constraints"] = consistency_json(cs, report);
            write_json(cfg.output_dir / "diagnostics.json", doc);
            throw InfeasibleError("compile: prior constraints are inconsistent (rank " +
                                  std::to_string(report.rank) +
                                  " of A_eq rises when b_eq is appended)");
        }
    }

    PipelineResult result = identify_pipeline(data, cfg.priors, options);
    {
        auto out = open_output(cfg.output_dir / "model.txt");
        write_model(out, result.realization.model);
    }
    {
        auto out = open_output(cfg.output_dir / "markov.csv");
        write_markov_csv(out, result.estimate.markov);
    }
    write_json(cfg.output_dir / "diagnostics.json", diagnostics_json(result, options));
    return result;
}

EqualityConstraintSet run_compile_priors(const RunConfig& cfg) {
    Eigen::Index outputs = 0;
    Eigen::Index inputs = 0;
    double Ts = cfg.Ts.value_or(0.0);
    if (!cfg.dataset.empty()) {
        if (!cfg.Ts) {
            throw InputError("compile-priors needs the sampling period Ts");
        }
        const IdentDataset data = load_dataset(cfg.dataset, *cfg.Ts);
        outputs = data.outputs();
        inputs = data.inputs();
    } else {
        if (!cfg.outputs || !cfg.inputs || !cfg.Ts) {
            throw InputError("compile-priors needs a dataset or outputs, inputs and Ts");
        }
        outputs = *cfg.outputs;
        inputs = *cfg.inputs;
    }
    const MarkovIndexing indexing(outputs, inputs, cfg.horizon);
    EqualityConstraintSet cs = compile(cfg.priors, indexing, Ts);
    auto out = open_output(cfg.output_dir / "constraints.csv");
    write_constraints_csv(out, cs);
    return cs;
}

McStatistics summarize(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return McStatistics{quantile(values, 0.5), quantile(values, 0.25), quantile(values, 0.75)};
}

McSummary mc_compare(const StateSpaceModel& truth, std::span<const PriorSpec> priors,
                     const RunConfig& cfg) {
    if (cfg.mc_runs < 2) {
        throw InputError("mc-compare needs at least 2 runs");
    }
    if (cfg.mode == EstimationMethod::unconstrained) {
        throw InputError("mc-compare compares against a constrained mode (exact or weighted)");
    }
    const MarkovIndexing indexing(truth.outputs(), truth.inputs(), cfg.horizon);
    const Eigen::VectorXd m_true = indexing.vec(markov_sequence(truth, cfg.horizon));
    const Eigen::MatrixXd dc_true = indexing.unvec(m_true, truth.sampling_period()).sum();
    const double scale = m_true.norm();
    if (!(scale > 0.0)) {
        throw InputError("true Markov sequence is identically zero");
    }
    const EqualityConstraintSet cs = compile(priors, indexing, truth.sampling_period());
    if (cfg.mode == EstimationMethod::exact && check_consistency(cs).infeasible) {
        throw InfeasibleError("compile: prior constraints are inconsistent");
    }

    McSummary summary;
    std::vector<double> mu, mc, du, dcon;
    for (int r = 0; r < cfg.mc_runs; ++r) {
        const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(r));
        const IdentDataset data = simulate_dataset(
            truth, SimulationOptions{cfg.input, cfg.input_channel, cfg.samples, cfg.snr_db, seed});
        const FirRegression reg = build_fir_regression(data, cfg.horizon);
        const EstimateResult unc = ls_unconstrained(reg);
        const EstimateResult con = cfg.mode == EstimationMethod::exact
                                       ? ls_equality_exact(reg, cs)
                                       : ls_equality_weighted(reg, cs, cfg.weight);
        McRun run;
        run.run = r;
        run.seed = seed;
        run.markov_error_unconstrained = (unc.parameters - m_true).norm() / scale;
        run.markov_error_constrained = (con.parameters - m_true).norm() / scale;
        run.dc_error_unconstrained = (unc.markov.sum() - dc_true).norm();
        run.dc_error_constrained = (con.markov.sum() - dc_true).norm();
        tally(summary.markov_tally, run.markov_error_constrained, run.markov_error_unconstrained);
        tally(summary.dc_tally, run.dc_error_constrained, run.dc_error_unconstrained);
        mu.push_back(run.markov_error_unconstrained);
        mc.push_back(run.markov_error_constrained);
        du.push_back(run.dc_error_unconstrained);
        dcon.push_back(run.dc_error_constrained);
        summary.runs.push_back(run);
    }
    summary.markov_unconstrained = summarize(mu);
    summary.markov_constrained = summarize(mc);
    summary.dc_unconstrained = summarize(du);
    summary.dc_constrained = summarize(dcon);
    return summary;
}

McSummary run_mc_compare(const RunConfig& cfg) {
    const StateSpaceModel truth = generator_model(cfg);
    McSummary summary = mc_compare(truth, cfg.priors, cfg);

    {
        auto out = open_output(cfg.output_dir / "mc_runs.csv");
        out << "run,seed,markov_err_unconstrained,markov_err_constrained,dc_err_unconstrained,"
               "dc_err_constrained\n";
        for (const auto& run : summary.runs) {
            out << run.run << ',' << run.seed << ',' << format_number(run.markov_error_unconstrained)
                << ',' << format_number(run.markov_error_constrained) << ','
                << format_number(run.dc_error_unconstrained) << ','
                << format_number(run.dc_error_constrained) << '\n';
        }
    }
    {
        auto out = open_output(cfg.output_dir / "mc_summary.txt");
        const auto stats = [&](const char* label, const McStatistics& s) {
            out << std::left << std::setw(30) << label << " median " << format_short(s.median)
                << "  IQR " << format_short(s.iqr()) << "  [" << format_short(s.q25) << ", "
                << format_short(s.q75) << "]\n";
        };
        const auto tallies = [&](const char* label, const McTally& t) {
            const double n = static_cast<double>(t.wins + t.ties + t.losses);
            out << std::left << std::setw(30) << label << " wins " << t.wins << "  ties " << t.ties
                << "  losses " << t.losses << "  win rate " << format_short(t.wins / n) << '\n';
        };
        out << "runs " << summary.runs.size() << "  seed " << cfg.seed << "  mode "
            << to_string(cfg.mode) << "  horizon " << cfg.horizon << "  samples " << cfg.samples
            << "  snr_db " << (cfg.snr_db ? format_short(*cfg.snr_db) : std::string("none")) << '\n';
        stats("markov error unconstrained", summary.markov_unconstrained);
        stats("markov error constrained", summary.markov_constrained);
        stats("dc error unconstrained", summary.dc_unconstrained);
        stats("dc error constrained", summary.dc_constrained);
        tallies("markov error (constrained)", summary.markov_tally);
        tallies("dc error (constrained)", summary.dc_tally);
    }
    return summary;
}

} // namespace priorid::app
