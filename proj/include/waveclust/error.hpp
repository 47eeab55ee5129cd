#pragma once

#include <stdexcept>
#include <string>

namespace waveclust {

// Base of every error the library throws. The CLI maps each subclass onto an
// exit code, so keep the hierarchy flat.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-range input data (shapes, lengths, parameters of an op).
class InvalidInput : public Error {
public:
    using Error::Error;
};

// Solver configuration that cannot work (e.g. AMA step above its bound).
class InvalidConfig : public Error {
public:
    using Error::Error;
};

// Non-finite iterates or a failed factorization.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidInput(msg);
}

}  // namespace detail
}  // namespace waveclust
