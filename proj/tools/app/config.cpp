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
#include "priorid_app/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "priorid/errors.hpp"
#include "priorid_app/io.hpp"

namespace priorid::app {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& what) {
    if (!obj.is_object()) {
        throw InputError(what + " must be a JSON object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw InputError(what + ": unknown key '" + key + "'");
        }
    }
}

double number(const json& obj, const char* key, const std::string& what) {
    if (!obj.contains(key)) {
        throw InputError(what + ": missing '" + key + "'");
    }
    if (!obj.at(key).is_number()) {
        throw InputError(what + ": '" + key + "' must be a number");
    }
    return obj.at(key).get<double>();
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& what) {
    if (!obj.contains(key) || obj.at(key).is_null()) {
        return std::nullopt;
    }
    return number(obj, key, what);
}

int integer(const json& obj, const char* key, const std::string& what) {
    if (!obj.contains(key)) {
        throw InputError(what + ": missing '" + key + "'");
    }
    if (!obj.at(key).is_number_integer()) {
        throw InputError(what + ": '" + key + "' must be an integer");
    }
    return obj.at(key).get<int>();
}

Channel channel(const json& obj, const char* out_key, const char* in_key, const std::string& what) {
    return Channel{integer(obj, out_key, what), integer(obj, in_key, what)};
}

PrototypeModel make_prototype(const std::string& name,
                              const std::function<std::optional<double>(const char*)>& get,
                              const std::string& what) {
    const auto need = [&](const char* key) {
        const auto v = get(key);
        if (!v) {
            throw InputError(what + ": prototype '" + name + "' needs parameter '" + key + "'");
        }
        return *v;
    };
    const double K = get("K").value_or(1.0);
    const std::string n = lower(name);
    PrototypeModel proto;
    if (n == "integrator" || n == "g1") {
        proto = Integrator{K};
    } else if (n == "first_order" || n == "g2") {
        proto = FirstOrder{K, need("tau")};
    } else if (n == "integrator_first_order" || n == "g3") {
        proto = IntegratorFirstOrder{K, need("tau")};
    } else if (n == "two_time_constants" || n == "g4") {
        proto = TwoTimeConstants{K, need("tau1"), need("tau2")};
    } else if (n == "second_order" || n == "g5") {
        proto = SecondOrderOsc{K, need("w0"), need("xi")};
    } else {
        throw InputError(what + ": unknown prototype '" + name + "'");
    }
    validate(proto);
    return proto;
}

} // namespace

InputKind parse_input_kind(std::string_view text) {
    const std::string s = lower(text);
    if (s == "impulse") return InputKind::impulse;
    if (s == "step") return InputKind::step;
    if (s == "prbs") return InputKind::prbs;
    if (s == "white") return InputKind::white;
    throw InputError("unknown input kind '" + std::string(text) +
                     "' (expected impulse, step, prbs or white)");
}

std::string to_string(InputKind kind) {
    switch (kind) {
    case InputKind::impulse:
        return "impulse";
    case InputKind::step:
        return "step";
    case InputKind::prbs:
        return "prbs";
    case InputKind::white:
        return "white";
    }
    return "unknown";
}

EstimationMethod parse_method(std::string_view text) {
    const std::string s = lower(text);
    if (s == "unconstrained") return EstimationMethod::unconstrained;
    if (s == "exact") return EstimationMethod::exact;
    if (s == "weighted") return EstimationMethod::weighted;
    throw InputError("unknown mode '" + std::string(text) +
                     "' (expected unconstrained, exact or weighted)");
}

PrototypeModel parse_prototype(const json& spec) {
    const std::string what = "prototype";
    require_keys(spec, {"prototype", "K", "tau", "tau1", "tau2", "w0", "xi"}, what);
    if (!spec.contains("prototype") || !spec.at("prototype").is_string()) {
        throw InputError(what + ": missing string 'prototype'");
    }
    return make_prototype(
        spec.at("prototype").get<std::string>(),
        [&](const char* key) { return optional_number(spec, key, what); }, what);
}

PrototypeModel parse_prototype(std::string_view text) {
    const std::string what = "prototype '" + std::string(text) + "'";
    const auto colon = text.find(':');
    const std::string name(text.substr(0, colon));
    std::map<std::string, double> params;
    if (colon != std::string_view::npos) {
        std::string_view rest = text.substr(colon + 1);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string_view item = rest.substr(0, comma);
            const auto eq = item.find('=');
            if (eq == std::string_view::npos) {
                throw InputError(what + ": expected key=value, found '" + std::string(item) + "'");
            }
            const std::string key(item.substr(0, eq));
            if (key != "K" && key != "tau" && key != "tau1" && key != "tau2" && key != "w0" &&
                key != "xi") {
                throw InputError(what + ": unknown parameter '" + key + "'");
            }
            params[key] = parse_number(item.substr(eq + 1), what + " parameter " + key);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        }
    }
    return make_prototype(
        name,
        [&](const char* key) -> std::optional<double> {
            const auto it = params.find(key);
            return it == params.end() ? std::nullopt : std::optional<double>(it->second);
        },
        what);
}

PriorSpec parse_prior(const json& entry, std::optional<double> Ts) {
    if (!entry.is_object() || !entry.contains("type") || !entry.at("type").is_string()) {
        throw InputError("prior entries must be objects with a string 'type'");
    }
    const std::string type = entry.at("type").get<std::string>();
    const std::string what = "prior '" + type + "'";

    if (type == "dc_gain") {
        require_keys(entry, {"type", "i", "j", "value"}, what);
        return prior::DcGain{channel(entry, "i", "j", what), number(entry, "value", what)};
    }
    if (type == "dc_gain_matrix") {
        require_keys(entry, {"type", "matrix"}, what);
        const auto& rows = entry.contains("matrix") ? entry.at("matrix") : json();
        if (!rows.is_array() || rows.empty() || !rows.front().is_array()) {
            throw InputError(what + ": 'matrix' must be a nonempty array of rows");
        }
        Eigen::MatrixXd gains(static_cast<Eigen::Index>(rows.size()),
                              static_cast<Eigen::Index>(rows.front().size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!rows[r].is_array() || rows[r].size() != rows.front().size()) {
                throw InputError(what + ": ragged matrix row " + std::to_string(r + 1));
            }
            for (std::size_t c = 0; c < rows[r].size(); ++c) {
                if (!rows[r][c].is_number()) {
                    throw InputError(what + ": non-numeric matrix entry");
                }
                gains(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    rows[r][c].get<double>();
            }
        }
        return prior::DcGainMatrix{std::move(gains)};
    }
    if (type == "gain_ratio") {
        require_keys(entry, {"type", "i", "j", "p", "q", "ratio"}, what);
        return prior::GainRatio{channel(entry, "i", "j", what), channel(entry, "p", "q", what),
                                number(entry, "ratio", what)};
    }
    if (type == "first_order") {
        require_keys(entry, {"type", "i", "j", "tau", "K"}, what);
        return prior::FirstOrderDecay{channel(entry, "i", "j", what), number(entry, "tau", what),
                                      optional_number(entry, "K", what)};
    }
    if (type == "integrator") {
        require_keys(entry, {"type", "i", "j", "K"}, what);
        return prior::IntegratorChannel{channel(entry, "i", "j", what),
                                        optional_number(entry, "K", what)};
    }
    if (type == "second_order") {
        require_keys(entry,
                     {"type", "i", "j", "alpha1", "alpha0", "beta1", "beta0", "prototype",
                      "with_gain"},
                     what);
        prior::SecondOrderRecurrence rec{channel(entry, "i", "j", what), 0.0, 0.0, std::nullopt};
        if (entry.contains("prototype")) {
            if (!Ts) {
                throw InputError(what + ": a prototype-based entry needs the sampling period Ts");
            }
            const auto coeffs = zoh_second_order(parse_prototype(entry.at("prototype")), *Ts);
            rec.alpha1 = coeffs.alpha1;
            rec.alpha0 = coeffs.alpha0;
            if (entry.value("with_gain", false)) {
                rec.seed = prior::SecondOrderSeed{coeffs.beta1, coeffs.beta0};
            }
        } else {
            rec.alpha1 = number(entry, "alpha1", what);
            rec.alpha0 = number(entry, "alpha0", what);
            const auto b1 = optional_number(entry, "beta1", what);
            const auto b0 = optional_number(entry, "beta0", what);
            if (b1.has_value() != b0.has_value()) {
                throw InputError(what + ": give both 'beta1' and 'beta0' or neither");
            }
            if (b1) {
                rec.seed = prior::SecondOrderSeed{*b1, *b0};
            }
        }
        return rec;
    }
    if (type == "zero_channel") {
        require_keys(entry, {"type", "i", "j"}, what);
        return prior::ZeroChannel{channel(entry, "i", "j", what)};
    }
    throw InputError("unknown prior type '" + type + "'");
}

std::vector<PriorSpec> parse_priors(const json& list, std::optional<double> Ts) {
    if (!list.is_array()) {
        throw InputError("'priors' must be an array");
    }
    std::vector<PriorSpec> priors;
    for (const auto& entry : list) {
        priors.push_back(parse_prior(entry, Ts));
    }
    return priors;
}

namespace {

RunConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
    require_keys(doc,
                 {"dataset", "Ts", "horizon", "q", "p", "mode", "weight", "order", "order_tol",
                  "priors", "delays", "seed", "mc_runs", "snr_db", "generator", "input",
                  "input_channel", "samples", "outputs", "inputs", "output_dir", "output_file"},
                 "config");
    const std::string what = "config";
    const auto path = [&](const char* key) {
        std::filesystem::path p = doc.at(key).get<std::string>();
        return p.is_absolute() ? p : base_dir / p;
    };

    RunConfig cfg;
    if (doc.contains("dataset")) cfg.dataset = path("dataset");
    cfg.Ts = optional_number(doc, "Ts", what);
    if (doc.contains("horizon")) cfg.horizon = integer(doc, "horizon", what);
    if (doc.contains("q")) cfg.block_rows = integer(doc, "q", what);
    if (doc.contains("p")) cfg.block_cols = integer(doc, "p", what);
    if (doc.contains("mode")) cfg.mode = parse_method(doc.at("mode").get<std::string>());
    cfg.weight = optional_number(doc, "weight", what);
    if (doc.contains("order")) {
        if (doc.at("order").is_string() && doc.at("order").get<std::string>() == "auto") {
            cfg.order.reset();
        } else {
            cfg.order = integer(doc, "order", what);
        }
    }
    if (doc.contains("order_tol")) cfg.order_tolerance = number(doc, "order_tol", what);
    if (doc.contains("priors")) cfg.priors = parse_priors(doc.at("priors"), cfg.Ts);
    if (doc.contains("delays")) {
        for (const auto& d : doc.at("delays")) {
            if (!d.is_number_integer()) {
                throw InputError("config: delays must be integers");
            }
            cfg.delays.push_back(d.get<int>());
        }
    }
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) {
            throw InputError("config: 'seed' must be a nonnegative integer");
        }
        cfg.seed = doc.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("mc_runs")) cfg.mc_runs = integer(doc, "mc_runs", what);
    cfg.snr_db = optional_number(doc, "snr_db", what);
    if (doc.contains("generator")) {
        const auto& g = doc.at("generator");
        if (g.is_string()) {
            cfg.generator.prototype = parse_prototype(g.get<std::string_view>());
        } else if (g.is_object() && g.contains("model_file")) {
            require_keys(g, {"model_file"}, "generator");
            std::filesystem::path p = g.at("model_file").get<std::string>();
            cfg.generator.model_file = p.is_absolute() ? p : base_dir / p;
        } else {
            cfg.generator.prototype = parse_prototype(g);
        }
    }
    if (doc.contains("input")) cfg.input = parse_input_kind(doc.at("input").get<std::string>());
    if (doc.contains("input_channel")) cfg.input_channel = integer(doc, "input_channel", what);
    if (doc.contains("samples")) cfg.samples = integer(doc, "samples", what);
    if (doc.contains("outputs")) cfg.outputs = integer(doc, "outputs", what);
    if (doc.contains("inputs")) cfg.inputs = integer(doc, "inputs", what);
    if (doc.contains("output_dir")) cfg.output_dir = path("output_dir");
    if (doc.contains("output_file")) cfg.output_file = path("output_file");
    return cfg;
}

} // namespace

RunConfig run_config_from_json(const json& doc, const std::filesystem::path& base_dir) {
    try {
        return config_from_json(doc, base_dir);
    } catch (const json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open config file '" + path.string() + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError("config file '" + path.string() + "': " + e.what());
    }
    return run_config_from_json(doc, path.parent_path());
}

} // namespace priorid::app
