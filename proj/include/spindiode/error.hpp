// Exception hierarchy shared by the library and the CLI

#pragma once

#include <stdexcept>
#include <string>

namespace spindiode {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operator shapes or site indices that do not fit together.
struct DimensionError : Error {
    using Error::Error;
};

/// A model or sweep description that fails validation. The message starts with the field path.
struct ConfigError : Error {
    using Error::Error;
};

/// Numerical failure: eigensolver breakdown, non-finite entries, non-physical states.
struct NumericalError : Error {
    using Error::Error;
};

/// Raised when a unique steady state was required but the null space is degenerate.
struct DegenerateSteadyState : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace spindiode
