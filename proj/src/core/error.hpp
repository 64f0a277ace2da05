#pragma once

#include <stdexcept>
#include <string>

namespace mdne {

// Base of every error the library raises. The C API maps each subclass onto
// one status code, so keep this hierarchy flat.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operand dimensions do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Malformed input text (data files, configs, checkpoints).
class ParseError : public Error {
public:
    using Error::Error;
};

// Arguments or configuration outside their documented domain.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A caller broke an API contract, e.g. handed backward() a stale cache.
class ContractError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Optimization failed (non-finite loss after all retries).
class TrainingError : public Error {
public:
    TrainingError(const std::string& what, std::size_t iteration)
        : Error(what), iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

}  // namespace mdne
