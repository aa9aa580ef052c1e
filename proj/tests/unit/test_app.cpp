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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "priorid/errors.hpp"
#include "priorid_app/commands.hpp"
#include "priorid_app/config.hpp"
#include "priorid_app/io.hpp"

using namespace priorid;
using namespace priorid::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("priorid_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string error_of(const auto& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

RunConfig first_order_config(const fs::path& dir) {
    RunConfig cfg;
    cfg.Ts = 1.0;
    cfg.generator.prototype = FirstOrder{2.0, 10.0};
    cfg.samples = 300;
    cfg.seed = 7;
    cfg.horizon = 60;
    cfg.dataset = dir / "data.csv";
    cfg.output_file = cfg.dataset;
    cfg.output_dir = dir / "out";
    return cfg;
}

} // namespace

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(2.0) == "2");
    CHECK(format_short(1.0 / 3.0) == "0.333333");
    CHECK(parse_number("1e-3", "x") == 1e-3);
    CHECK_THROWS_AS(parse_number("abc", "x"), InputError);
    CHECK_THROWS_AS(parse_number("nan", "x"), InputError);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = dist(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(parse_number(format_number(v), "v") == v);
    }
}

TEST_CASE("dataset reading") {
    SUBCASE("happy path") {
        std::istringstream in("t,u1,y1\n0,1,0\n1,0,1\n2,0,0.5\n");
        const auto d = read_dataset(in, 1.0);
        CHECK(d.samples() == 3);
        CHECK(d.Y(2, 0) == 0.5);
    }
    SUBCASE("multichannel") {
        std::istringstream in("t,u1,u2,y1\n0,1,2,5\n0.5,3,4,6\n");
        const auto d = read_dataset(in, 0.5);
        CHECK(d.inputs() == 2);
        CHECK(d.U(1, 0) == 3.0);
        CHECK(d.U(1, 1) == 4.0);
        CHECK(d.Y(1, 0) == 6.0);
    }
    SUBCASE("missing output column") {
        std::istringstream in("t,u1\n0,1\n");
        CHECK(error_of([&] { read_dataset(in, 1.0); }).find("'y1'") != std::string::npos);
    }
    SUBCASE("sampling period mismatch") {
        std::istringstream in("t,u1,y1\n0,1,0\n1,0,1\n");
        CHECK(error_of([&] { read_dataset(in, 0.5); }).find("sampling period") != std::string::npos);
    }
    SUBCASE("ragged row names the line") {
        std::istringstream in("t,u1,y1\n0,1,0\n1,0\n");
        CHECK(error_of([&] { read_dataset(in, 1.0); }).find("line 3") != std::string::npos);
    }
    SUBCASE("NaN entry") {
        std::istringstream in("t,u1,y1\n0,1,nan\n");
        CHECK_THROWS_AS(read_dataset(in, 1.0), InputError);
    }
    SUBCASE("lossless round trip") {
        std::mt19937_64 rng(5);
        IdentDataset d{priorid::testing::random_matrix(rng, 50, 2), priorid::testing::random_matrix(rng, 50, 3),
                       0.1};
        std::stringstream io;
        write_dataset(io, d);
        const auto back = read_dataset(io, 0.1);
        CHECK(back.U == d.U);
        CHECK(back.Y == d.Y);
    }
}

TEST_CASE("model file round trip") {
    std::mt19937_64 rng(9);
    const auto model = priorid::testing::random_stable_model(rng, 3, 2, 2, 0.25);
    std::stringstream io;
    write_model(io, model);
    const auto back = read_model(io);
    CHECK(back.A() == model.A());
    CHECK(back.B() == model.B());
    CHECK(back.C() == model.C());
    CHECK(back.D() == model.D());
    CHECK(back.sampling_period() == 0.25);

    std::istringstream bad("2 1 1 1\nA:\n1 0\n");
    CHECK_THROWS_AS(read_model(bad), InputError);
}

TEST_CASE("config parsing") {
    SUBCASE("priors") {
        const auto j = nlohmann::json::parse(R"([
            {"type": "dc_gain", "i": 1, "j": 1, "value": 2.0},
            {"type": "first_order", "i": 1, "j": 1, "tau": 10},
            {"type": "zero_channel", "i": 1, "j": 2},
            {"type": "second_order", "i": 1, "j": 1,
             "prototype": {"prototype": "second_order", "K": 1, "w0": 1, "xi": 0.5}, "with_gain": true}
        ])");
        const auto priors = parse_priors(j, 0.5);
        REQUIRE(priors.size() == 4);
        const auto& so = std::get<prior::SecondOrderRecurrence>(priors[3]);
        const auto c = zoh_second_order(SecondOrderOsc{1.0, 1.0, 0.5}, 0.5);
        CHECK(so.alpha1 == c.alpha1);
        REQUIRE(so.seed.has_value());
        CHECK(so.seed->beta0 == c.beta0);

        CHECK_THROWS_AS(parse_prior(nlohmann::json::parse(R"({"type": "dc_gain", "i": 1, "j": 1})")),
                        InputError);
        CHECK_THROWS_AS(parse_prior(nlohmann::json::parse(R"({"type": "bogus"})")), InputError);
        CHECK_THROWS_AS(
            parse_prior(nlohmann::json::parse(R"({"type": "zero_channel", "i": 1, "j": 1, "x": 0})")),
            InputError);
    }
    SUBCASE("prototypes") {
        const auto p = parse_prototype(std::string_view("first_order:K=2,tau=10"));
        CHECK(std::get<FirstOrder>(p).tau == 10.0);
        CHECK(std::holds_alternative<SecondOrderOsc>(parse_prototype(std::string_view("G5:K=1,w0=2,xi=0.3"))));
        CHECK_THROWS_AS(parse_prototype(std::string_view("first_order:K=2")), InputError);
    }
    SUBCASE("run config") {
        const auto doc = nlohmann::json::parse(R"({
            "dataset": "d.csv", "Ts": 0.5, "horizon": 12, "mode": "weighted", "weight": 100,
            "delays": [0, 2], "seed": 9, "priors": [{"type": "zero_channel", "i": 1, "j": 2}]
        })");
        const auto cfg = run_config_from_json(doc, "/base");
        CHECK(cfg.dataset == fs::path("/base/d.csv"));
        CHECK(cfg.mode == EstimationMethod::weighted);
        CHECK(cfg.weight == 100.0);
        CHECK(cfg.delays == std::vector<int>{0, 2});
        CHECK(cfg.priors.size() == 1);
        CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"horizon": "x"})"), "."), InputError);
        CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"mode": "fast"})"), "."), InputError);
    }
}

TEST_CASE("simulate_dataset") {
    const auto model = discretize(FirstOrder{2.0, 10.0}, 1.0);
    SUBCASE("impulse without noise equals the pulse response") {
        SimulationOptions opt;
        opt.input = InputKind::impulse;
        opt.samples = 30;
        const auto d = simulate_dataset(model, opt);
        const Eigen::MatrixXd pulse = pulse_response(model, 1, 29);
        for (int k = 0; k < 30; ++k) {
            CHECK(d.Y(k, 0) == doctest::Approx(pulse(k, 0)).epsilon(1e-12));
        }
    }
    SUBCASE("SNR within one decibel") {
        SimulationOptions clean;
        clean.samples = 4000;
        clean.seed = 11;
        SimulationOptions noisy = clean;
        noisy.snr_db = 10.0;
        const auto a = simulate_dataset(model, clean);
        const auto b = simulate_dataset(model, noisy);
        CHECK(a.U == b.U);
        const double signal = a.Y.squaredNorm();
        const double noise = (b.Y - a.Y).squaredNorm();
        CHECK(std::abs(10.0 * std::log10(signal / noise) - 10.0) <= 1.0);
    }
    SUBCASE("deterministic per seed") {
        SimulationOptions opt;
        opt.input = InputKind::prbs;
        opt.snr_db = 5.0;
        opt.seed = 3;
        const auto a = simulate_dataset(model, opt);
        const auto b = simulate_dataset(model, opt);
        CHECK(a.U == b.U);
        CHECK(a.Y == b.Y);
        opt.seed = 4;
        CHECK_FALSE(simulate_dataset(model, opt).Y == a.Y);
        CHECK(a.U.cwiseAbs().minCoeff() == 1.0);
    }
    SUBCASE("identically zero output cannot be scaled") {
        SimulationOptions opt;
        opt.input = InputKind::step;
        opt.input_channel = 1;
        opt.snr_db = 10.0;
        const StateSpaceModel zero(model.A(), model.B(), Eigen::MatrixXd::Zero(1, 1),
                                   Eigen::MatrixXd::Zero(1, 1), 1.0);
        CHECK_THROWS_AS(simulate_dataset(zero, opt), InputError);
    }
}

TEST_CASE("shift_inputs") {
    Eigen::MatrixXd U(5, 2);
    U << 1, 10, 2, 20, 3, 30, 4, 40, 5, 50;
    IdentDataset d{U, Eigen::VectorXd::LinSpaced(5, 0, 4), 1.0};
    const std::vector<int> delays{0, 2};
    const auto s = shift_inputs(d, delays);
    REQUIRE(s.samples() == 3);
    CHECK(s.U(0, 0) == 3.0);
    CHECK(s.U(0, 1) == 10.0);
    CHECK(s.Y(0, 0) == 2.0);
    const std::vector<int> negative{-1, 0};
    CHECK_THROWS_AS(shift_inputs(d, negative), InputError);
    const std::vector<int> wrong_size{1};
    CHECK_THROWS_AS(shift_inputs(d, wrong_size), InputError);
}

TEST_CASE("run_identify") {
    const auto dir = scratch_dir("identify");
    auto cfg = first_order_config(dir);
    run_simulate(cfg);

    SUBCASE("noise-free data with the decay prior") {
        cfg.priors = {prior::FirstOrderDecay{{1, 1}, 10.0, std::nullopt}};
        const auto r = run_identify(cfg);
        CHECK(r.estimate.constraint_residual <= 1e-8);
        const auto diag = nlohmann::json::parse(slurp(cfg.output_dir / "diagnostics.json"));
        CHECK(diag["status"] == "ok");
        CHECK(diag["estimate"]["constraint_residual"].get<double>() <= 1e-8);
        CHECK(fs::exists(cfg.output_dir / "model.txt"));
        CHECK(slurp(cfg.output_dir / "markov.csv").rfind("k,i,j,value\n", 0) == 0);
        CHECK(load_model(cfg.output_dir / "model.txt").states() == r.realization.order);
    }
    SUBCASE("empty priors are coerced to unconstrained") {
        const auto r = run_identify(cfg);
        CHECK(r.estimate.method == EstimationMethod::unconstrained);
        const auto diag = nlohmann::json::parse(slurp(cfg.output_dir / "diagnostics.json"));
        CHECK(diag["method"] == "unconstrained");
        CHECK(diag["notices"].size() == 1);
    }
    SUBCASE("infeasible priors write a report") {
        cfg.priors = {prior::DcGain{{1, 1}, 2.0}, prior::DcGain{{1, 1}, 3.0}};
        CHECK_THROWS_AS(run_identify(cfg), InfeasibleError);
        const auto diag = nlohmann::json::parse(slurp(cfg.output_dir / "diagnostics.json"));
        CHECK(diag["status"] == "infeasible");
        CHECK(diag["constraints"]["infeasible"] == true);
    }
    SUBCASE("delays") {
        cfg.delays = {3};
        CHECK(run_identify(cfg).estimate.markov.horizon() == cfg.horizon);
        cfg.delays = {1, 1};
        CHECK_THROWS_AS(run_identify(cfg), InputError);
    }
    fs::remove_all(dir);
}

TEST_CASE("run_compile_priors") {
    const auto dir = scratch_dir("compile");
    RunConfig cfg;
    cfg.Ts = 1.0;
    cfg.horizon = 3;
    cfg.outputs = 1;
    cfg.inputs = 1;
    cfg.output_dir = dir;
    cfg.priors = {prior::DcGain{{1, 1}, 2.0}};
    const auto cs = run_compile_priors(cfg);
    CHECK(cs.rows() == 1);
    const std::string csv = slurp(dir / "constraints.csv");
    CHECK(csv == "row,source,prior,m_0_1_1,m_1_1_1,m_2_1_1,m_3_1_1,rhs\n"
                 "0,0,\"dc_gain(1,1) = 2\",1,1,1,1,2\n");
    fs::remove_all(dir);
}

TEST_CASE("mc_compare") {
    RunConfig cfg;
    cfg.Ts = 1.0;
    cfg.horizon = 40;
    cfg.samples = 120;
    cfg.mc_runs = 8;
    cfg.seed = 5;
    const auto truth = discretize(FirstOrder{2.0, 2.0}, 1.0);
    SUBCASE("noise-free runs tie") {
        const std::vector<PriorSpec> priors{prior::FirstOrderDecay{{1, 1}, 2.0, std::nullopt}};
        const auto s = mc_compare(truth, priors, cfg);
        CHECK(s.markov_tally.ties == 8);
        CHECK(s.dc_tally.ties == 8);
    }
    SUBCASE("pinned truth has zero constrained error") {
        cfg.snr_db = 0.0;
        // Decay with its exact gain pins every entry.
        const std::vector<PriorSpec> priors{prior::FirstOrderDecay{{1, 1}, 2.0, 2.0}};
        const auto s = mc_compare(truth, priors, cfg);
        for (const auto& run : s.runs) {
            CHECK(run.markov_error_constrained <= 1e-12);
            CHECK(run.markov_error_unconstrained > 0.01);
        }
        CHECK(s.markov_tally.wins == 8);
    }
    SUBCASE("summary statistics") {
        const auto st = summarize({4, 1, 3, 2});
        CHECK(st.median == 2.5);
        CHECK(st.q25 == 1.75);
        CHECK(st.q75 == 3.25);
        CHECK(st.iqr() == 1.5);
    }
    SUBCASE("seeds are independent of run order") {
        CHECK(derive_seed(1, 0) != derive_seed(1, 1));
        CHECK(derive_seed(1, 5) == derive_seed(1, 5));
    }
}
