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
#ifndef PRIORID_ERRORS_HPP
#define PRIORID_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace priorid {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatches, out-of-range channels,
/// nonpositive time constants, unparsable files.
class InputError : public Error {
public:
    using Error::Error;
};

/// The equality constraints admit no solution.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// A numerical precondition failed (instability, singular transforms).
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace priorid

#endif // PRIORID_ERRORS_HPP
