// Copyright 2026 The cabench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CABENCH_ERRORS_HPP
#define CABENCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cabench {

/// Base class of every error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operand sizes disagree (qubit counts, vector lengths).
struct DimensionError : Error {
    using Error::Error;
};

/// A problem is too large for the requested exact method.
struct ResourceError : Error {
    using Error::Error;
};

/// An internal or caller precondition on mathematical structure was broken.
struct ContractViolation : Error {
    using Error::Error;
};

/// Argument outside the documented domain.
struct DomainError : Error {
    using Error::Error;
};

/// Operation not supported for the given input (e.g. non-Clifford targets).
struct UnsupportedError : Error {
    using Error::Error;
};

/// Decay fit could not be performed.
struct FitError : Error {
    using Error::Error;
};

/// Calibration scan produced no usable signal or a bad fit.
struct CalibrationError : Error {
    using Error::Error;
};

/// Scan response too flat to locate a phase.
struct NoSignalError : CalibrationError {
    using CalibrationError::CalibrationError;
};

/// Sinusoid fit residual above the accepted threshold.
struct PoorFitError : CalibrationError {
    using CalibrationError::CalibrationError;
};

/// A report lacks subset fidelities needed by an analysis.
struct IncompleteReportError : Error {
    using Error::Error;
};

/// Optimization stopped on a non-finite objective value.
struct NonFiniteObjectiveError : Error {
    using Error::Error;
};

/// Configuration document failed validation. `field` names the offending key path.
struct ConfigError : Error {
    ConfigError(std::string field_path, const std::string &what)
        : Error(field_path + ": " + what), field(std::move(field_path)) {}
    std::string field;
};

}  // namespace cabench

#endif
