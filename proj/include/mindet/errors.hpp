#pragma once

#include <stdexcept>
#include <string>

namespace mindet {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// two grids were required to be identical (same interval, same n) but differ
struct GridMismatch : Error {
    using Error::Error;
};

// grids are individually fine but violate a pairing rule (spacing, span, ...)
struct GridIncompatible : Error {
    using Error::Error;
};

struct NotADensity : Error {
    using Error::Error;
};

struct CharFnInvalid : Error {
    using Error::Error;
};

// generator support would extend beyond the grid interval
struct SupportOverflow : Error {
    using Error::Error;
};

struct SupportsOverlap : Error {
    using Error::Error;
};

struct LambdaTooSmall : Error {
    using Error::Error;
};

struct OrderTooHigh : Error {
    using Error::Error;
};

struct ThetaOffGrid : Error {
    using Error::Error;
};

struct GridTooLarge : Error {
    using Error::Error;
};

struct CrossTermLeak : Error {
    using Error::Error;
};

struct NoCompactSupport : Error {
    using Error::Error;
};

// function has non-negligible mass in the outermost grid cells, so
// periodic spectral differentiation would wrap it around
struct EdgeSupport : Error {
    using Error::Error;
};

struct EmptyFamily : Error {
    using Error::Error;
};

struct ConfigInvalid : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace mindet
