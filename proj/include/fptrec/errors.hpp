#pragma once

#include <stdexcept>
#include <string>

namespace fptrec {

/// Invalid inputs: malformed files, violated graph invariants, bad options.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical breakdown: singular systems, non-finite intermediates.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fptrec
