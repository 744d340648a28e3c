#pragma once

#include <stdexcept>
#include <string>

namespace stokeslab {

// Base class for all recoverable errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidGeometry : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct IndexOutOfRange : Error {
    using Error::Error;
};
struct EigensolveFailure : Error {
    using Error::Error;
};
struct ResidualTooLarge : Error {
    using Error::Error;
};
struct NotInSpan : Error {
    using Error::Error;
};
struct SolveFailure : Error {
    using Error::Error;
};
struct SingularResolvent : Error {
    using Error::Error;
};
struct IllPosed : Error {
    using Error::Error;
};
struct KernelComponentPresent : Error {
    using Error::Error;
};
struct BranchCut : Error {
    using Error::Error;
};
struct ExponentOutOfRange : Error {
    using Error::Error;
};
struct WindowTooNarrow : Error {
    using Error::Error;
};
struct NonUniformSamples : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace stokeslab
