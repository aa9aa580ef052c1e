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
#include "priorid_app/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "priorid/errors.hpp"

namespace priorid::app {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        fields.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return fields;
}

std::string format_with(double value, int precision) {
    std::array<char, 64> buf{};
    const auto res =
        std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, precision);
    return std::string(buf.data(), res.ptr);
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

void write_matrix(std::ostream& out, const char* label, const Eigen::MatrixXd& M) {
    out << label << ":\n";
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            out << (c ? " " : "") << format_number(M(r, c));
        }
        out << '\n';
    }
}

} // namespace

std::string format_number(double value) { return format_with(value, 17); }

std::string format_short(double value) { return format_with(value, 6); }

double parse_number(std::string_view text, const std::string& context) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw InputError(context + ": cannot parse '" + std::string(text) + "' as a number");
    }
    if (!std::isfinite(value)) {
        throw InputError(context + ": non-finite value '" + std::string(text) + "'");
    }
    return value;
}

IdentDataset read_dataset(std::istream& in, double Ts, const std::string& name) {
    if (!(std::isfinite(Ts) && Ts > 0.0)) {
        throw InputError(name + ": sampling period must be positive");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw InputError(name + ": empty file, expected header t,u1..,y1..");
    }
    const auto header = split(line, ',');
    if (header.empty() || header[0] != "t") {
        throw InputError(name + ": header must start with column 't'");
    }
    std::size_t col = 1;
    int inputs = 0;
    while (col < header.size() && header[col] == "u" + std::to_string(inputs + 1)) {
        ++inputs;
        ++col;
    }
    int outputs = 0;
    while (col < header.size() && header[col] == "y" + std::to_string(outputs + 1)) {
        ++outputs;
        ++col;
    }
    if (inputs == 0) {
        throw InputError(name + ": header has no input column (expected 'u1' after 't')");
    }
    if (outputs == 0) {
        const std::string got = col < header.size() ? "'" + std::string(header[col]) + "'" : "nothing";
        throw InputError(name + ": header is missing output column 'y1' (found " + got + ")");
    }
    if (col != header.size()) {
        throw InputError(name + ": unexpected header column '" + std::string(header[col]) + "'");
    }

    std::vector<double> times;
    std::vector<std::vector<double>> rows;
    const std::size_t width = header.size();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split(line, ',');
        const std::string where = name + " line " + std::to_string(line_no);
        if (fields.size() != width) {
            throw InputError(where + ": expected " + std::to_string(width) + " fields, found " +
                             std::to_string(fields.size()));
        }
        std::vector<double> values;
        values.reserve(width);
        for (std::size_t f = 0; f < width; ++f) {
            values.push_back(parse_number(fields[f], where + " column '" + std::string(header[f]) + "'"));
        }
        const double t = values[0];
        if (!times.empty()) {
            const double dt = t - times.back();
            if (!(dt > 0.0)) {
                throw InputError(where + ": time column is not strictly increasing");
            }
            if (std::abs(dt - Ts) > kSamplingTolerance * Ts) {
                throw InputError(where + ": time step " + format_short(dt) +
                                 " does not match the sampling period Ts = " + format_short(Ts));
            }
        }
        times.push_back(t);
        rows.push_back(std::move(values));
    }

    IdentDataset data;
    data.Ts = Ts;
    data.U.resize(static_cast<Eigen::Index>(rows.size()), inputs);
    data.Y.resize(static_cast<Eigen::Index>(rows.size()), outputs);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (int j = 0; j < inputs; ++j) {
            data.U(static_cast<Eigen::Index>(r), j) = rows[r][1 + j];
        }
        for (int i = 0; i < outputs; ++i) {
            data.Y(static_cast<Eigen::Index>(r), i) = rows[r][1 + inputs + i];
        }
    }
    return data;
}

IdentDataset load_dataset(const std::filesystem::path& path, double Ts) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open dataset '" + path.string() + "'");
    }
    return read_dataset(in, Ts, path.string());
}

void write_dataset(std::ostream& out, const IdentDataset& data) {
    out << 't';
    for (Eigen::Index j = 0; j < data.inputs(); ++j) {
        out << ",u" << j + 1;
    }
    for (Eigen::Index i = 0; i < data.outputs(); ++i) {
        out << ",y" << i + 1;
    }
    out << '\n';
    for (Eigen::Index t = 0; t < data.samples(); ++t) {
        out << format_number(static_cast<double>(t) * data.Ts);
        for (Eigen::Index j = 0; j < data.inputs(); ++j) {
            out << ',' << format_number(data.U(t, j));
        }
        for (Eigen::Index i = 0; i < data.outputs(); ++i) {
            out << ',' << format_number(data.Y(t, i));
        }
        out << '\n';
    }
}

void write_model(std::ostream& out, const StateSpaceModel& model) {
    out << model.states() << ' ' << model.inputs() << ' ' << model.outputs() << ' '
        << format_number(model.sampling_period()) << '\n';
    write_matrix(out, "A", model.A());
    write_matrix(out, "B", model.B());
    write_matrix(out, "C", model.C());
    write_matrix(out, "D", model.D());
}

StateSpaceModel read_model(std::istream& in, const std::string& name) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&](const std::string& expecting) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!trim(line).empty()) {
                return std::string(trim(line));
            }
        }
        throw InputError(name + ": unexpected end of file, expected " + expecting);
    };

    std::vector<std::string> dims;
    {
        std::istringstream header(next_line("'n n_u n_y Ts' line"));
        std::string token;
        while (header >> token) {
            dims.push_back(token);
        }
    }
    if (dims.size() != 4) {
        throw InputError(name + " line " + std::to_string(line_no) + ": expected 'n n_u n_y Ts'");
    }
    const std::string where = name + " line " + std::to_string(line_no);
    const auto as_count = [&](std::string_view s, const char* what) {
        const double v = parse_number(s, where + " " + what);
        if (v < 0 || v != std::floor(v)) {
            throw InputError(where + ": " + what + " must be a nonnegative integer");
        }
        return static_cast<Eigen::Index>(v);
    };
    const Eigen::Index n = as_count(dims[0], "n");
    const Eigen::Index nu = as_count(dims[1], "n_u");
    const Eigen::Index ny = as_count(dims[2], "n_y");
    const double Ts = parse_number(dims[3], where + " Ts");

    auto read_block = [&](const char* label, Eigen::Index rows, Eigen::Index cols) {
        const std::string tag = next_line(std::string("'") + label + ":'");
        if (tag != std::string(label) + ":") {
            throw InputError(name + " line " + std::to_string(line_no) + ": expected '" + label +
                             ":', found '" + tag + "'");
        }
        Eigen::MatrixXd M(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            std::istringstream row_stream(next_line(std::string("a row of ") + label));
            const std::string row_where = name + " line " + std::to_string(line_no);
            std::string token;
            Eigen::Index c = 0;
            while (row_stream >> token) {
                if (c >= cols) {
                    throw InputError(row_where + ": too many entries in " + label);
                }
                M(r, c++) = parse_number(token, row_where);
            }
            if (c != cols) {
                throw InputError(row_where + ": " + label + " row has " + std::to_string(c) +
                                 " entries, expected " + std::to_string(cols));
            }
        }
        return M;
    };

    Eigen::MatrixXd A = read_block("A", n, n);
    Eigen::MatrixXd B = read_block("B", n, nu);
    Eigen::MatrixXd C = read_block("C", ny, n);
    Eigen::MatrixXd D = read_block("D", ny, nu);
    return StateSpaceModel(std::move(A), std::move(B), std::move(C), std::move(D), Ts);
}

StateSpaceModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open model file '" + path.string() + "'");
    }
    return read_model(in, path.string());
}

void write_markov_csv(std::ostream& out, const MarkovSequence& markov) {
    out << "k,i,j,value\n";
    for (int k = 0; k <= markov.horizon(); ++k) {
        for (Eigen::Index i = 0; i < markov.outputs(); ++i) {
            for (Eigen::Index j = 0; j < markov.inputs(); ++j) {
                out << k << ',' << i + 1 << ',' << j + 1 << ',' << format_number(markov[k](i, j))
                    << '\n';
            }
        }
    }
}

void write_constraints_csv(std::ostream& out, const EqualityConstraintSet& cs) {
    const auto& ix = cs.indexing;
    std::vector<std::string> labels(static_cast<std::size_t>(ix.size()));
    for (int k = 0; k <= ix.horizon(); ++k) {
        for (int j = 1; j <= ix.inputs(); ++j) {
            for (int i = 1; i <= ix.outputs(); ++i) {
                labels[static_cast<std::size_t>(ix.index(k, i, j))] =
                    "m_" + std::to_string(k) + "_" + std::to_string(i) + "_" + std::to_string(j);
            }
        }
    }
    out << "row,source,prior";
    for (const auto& l : labels) {
        out << ',' << l;
    }
    out << ",rhs\n";
    for (Eigen::Index r = 0; r < cs.rows(); ++r) {
        const auto ur = static_cast<std::size_t>(r);
        out << r << ',' << cs.source[ur] << ',' << csv_quote(cs.provenance[ur]);
        for (Eigen::Index c = 0; c < cs.A_eq.cols(); ++c) {
            out << ',' << format_number(cs.A_eq(r, c));
        }
        out << ',' << format_number(cs.b_eq(r)) << '\n';
    }
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

} // namespace priorid::app
