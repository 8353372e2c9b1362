#pragma once

#include <stdexcept>
#include <string>

namespace cor {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mismatched dimensions, invalid probabilities, bad solver settings.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// An enumeration (outcomes, strategies) would exceed its configured size.
class BudgetError : public Error {
public:
    using Error::Error;
};

/// A sample has zero likelihood under every model.
class LikelihoodError : public Error {
public:
    using Error::Error;
};

/// A discretization grid does not cover the mass of some model.
class CoverageError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ConfigurationError(message);
}

}  // namespace detail
}  // namespace cor
