#pragma once

#include <stdexcept>
#include <string>

namespace nlstiff {

// Base of every error raised by the library. The CLI maps subclasses onto
// process exit codes, so new error types must pick a base deliberately.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller supplied inconsistent or out-of-range input.
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

class DimensionError : public InvalidArgumentError {
public:
    DimensionError(const std::string& what, std::size_t expected, std::size_t actual)
        : InvalidArgumentError(what + ": expected length " + std::to_string(expected) +
                               ", got " + std::to_string(actual)),
          expected_(expected), actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

// The requested point lies outside the workspace of the sub-chain.
class UnreachableError : public Error {
public:
    using Error::Error;
};

// Operation is not defined for this input class (e.g. a critical force for a
// non-straight two-link mechanism).
class NotApplicableError : public Error {
public:
    using Error::Error;
};

// Model-level degeneracies: the elastic model itself is ill-posed.
class ModelDegenerateError : public Error {
public:
    using Error::Error;
};

// Numerical failures: the model is valid but the computation broke down.
class NumericalError : public Error {
public:
    using Error::Error;
};

class SingularityError : public NumericalError {
public:
    SingularityError(const std::string& what, int rank)
        : NumericalError(what + " (rank " + std::to_string(rank) + ")"), rank_(rank) {}

    int rank() const noexcept { return rank_; }

private:
    int rank_;
};

class NonrealSpectrumError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class RankAnomalyError : public NumericalError {
public:
    RankAnomalyError(const std::string& what, int zero_count)
        : NumericalError(what), zero_count_(zero_count) {}

    int zero_count() const noexcept { return zero_count_; }

private:
    int zero_count_;
};

class DegenerateModeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularSampleError : public NumericalError {
public:
    SingularSampleError(const std::string& what, std::size_t index)
        : NumericalError(what + " at sample " + std::to_string(index)), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

}  // namespace nlstiff
