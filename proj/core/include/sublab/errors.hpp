#pragma once

#include <stdexcept>
#include <string>

namespace sublab {

/// Requested value would depend on data outside the declared grid/domain.
struct DomainOverflowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Instance exceeds the size caps of an exact-enumeration routine.
struct TooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Instance violates a structural precondition of the requested check.
struct InvalidInstanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sublab
