#pragma once

#include <stdexcept>
#include <string>

namespace bidcast {

// Base class for all recoverable errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateFit : Error {
    using Error::Error;
};
struct EmptySeries : Error {
    using Error::Error;
};
struct NonPositiveBids : Error {
    using Error::Error;
};
struct InsufficientDays : Error {
    using Error::Error;
};
struct ZeroVariance : Error {
    using Error::Error;
};
struct ZeroGradient : Error {
    using Error::Error;
};
struct TooFewRows : Error {
    using Error::Error;
};
struct TooShort : Error {
    using Error::Error;
};
struct InsufficientCoverage : Error {
    using Error::Error;
};
struct ZeroTrueBid : Error {
    using Error::Error;
};
struct TooFewScores : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

} // namespace bidcast
