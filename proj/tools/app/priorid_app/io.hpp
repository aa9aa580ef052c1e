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
#ifndef PRIORID_APP_IO_HPP
#define PRIORID_APP_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "priorid/estimate.hpp"
#include "priorid/priors.hpp"
#include "priorid/statespace.hpp"

namespace priorid::app {

/// Shortest-round-trip-safe form with 17 significant digits, locale free.
std::string format_number(double value);

/// Human-readable form with 6 significant digits.
std::string format_short(double value);

/// Parses a finite decimal number; `context` names the field in errors.
double parse_number(std::string_view text, const std::string& context);

/// Relative tolerance on the time-column spacing against Ts.
inline constexpr double kSamplingTolerance = 1e-6;

/**
 * Reads a dataset CSV with header `t,u1..u{n_u},y1..y{n_y}`. The time column
 * must increase with uniform spacing Ts.
 */
IdentDataset read_dataset(std::istream& in, double Ts, const std::string& name = "dataset");
IdentDataset load_dataset(const std::filesystem::path& path, double Ts);

/// Writes the dataset CSV with t = k Ts.
void write_dataset(std::ostream& out, const IdentDataset& data);

/**
 * Model file: a `n n_u n_y Ts` line followed by labeled blocks `A:`, `B:`,
 * `C:`, `D:`, each listing its rows with space-separated entries.
 */
void write_model(std::ostream& out, const StateSpaceModel& model);
StateSpaceModel read_model(std::istream& in, const std::string& name = "model");
StateSpaceModel load_model(const std::filesystem::path& path);

/// Markov CSV `k,i,j,value` with 1-based output i and input j.
void write_markov_csv(std::ostream& out, const MarkovSequence& markov);

/// Constraint dump: `row,source,prior,<one column per Markov entry>,rhs`.
void write_constraints_csv(std::ostream& out, const EqualityConstraintSet& cs);

/// Opens a file for writing, creating parent directories.
std::ofstream open_output(const std::filesystem::path& path);

} // namespace priorid::app

#endif // PRIORID_APP_IO_HPP
