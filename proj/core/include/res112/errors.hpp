#pragma once

#include <stdexcept>
#include <string>

namespace res112 {

/// Bad input: out-of-range parameters, malformed loops, wrong regime.
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Requested regime is outside what the algorithm supports (e.g. kappa <= 0 for h_min).
struct unsupported_regime : validation_error {
    using validation_error::validation_error;
};

/// A named loop was requested around a thread that does not exist for these parameters.
struct thread_absent : validation_error {
    using validation_error::validation_error;
};

/// Root finder / integrator did not deliver the requested accuracy.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace res112
