#pragma once

#include <stdexcept>
#include <string>

namespace mcns {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// wrong representation, bad argument combinations
struct UsageError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct NumericError : Error {
    using Error::Error;
};
// Delta^{-1} applied to data with nonzero total mass
struct ZeroMassError : Error {
    using Error::Error;
};
// field too large on the box faces for moment quadrature
struct TruncationDomainError : Error {
    using Error::Error;
};
struct UnsupportedOrderError : Error {
    using Error::Error;
};
struct FormatError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct DataError : Error {
    using Error::Error;
};

struct DivergenceError : Error {
    DivergenceError(const std::string& what, double t) : Error(what), time(t) {}
    double time;
};

}  // namespace mcns
