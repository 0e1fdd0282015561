#pragma once

#include <stdexcept>
#include <string>

namespace matrixinfo {

/// Base class for every error this library raises deliberately.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

class NotSymmetricError : public Error {
public:
    using Error::Error;
};

class NotPsdError : public Error {
public:
    using Error::Error;
};

class NonConvergenceError : public Error {
public:
    using Error::Error;
};

class SingularError : public Error {
public:
    using Error::Error;
};

class InvalidOrderError : public Error {
public:
    using Error::Error;
};

class ZeroMatrixError : public Error {
public:
    using Error::Error;
};

class TooFewClassesError : public Error {
public:
    using Error::Error;
};

class NotPartialOrthogonalError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class EmbeddingMismatchError : public Error {
public:
    using Error::Error;
};

class InvalidDistributionError : public Error {
public:
    using Error::Error;
};

class DivergedError : public Error {
public:
    DivergedError(const std::string& what, long iteration)
        : Error(what), iteration(iteration) {}
    long iteration;
};

/// Divergence of the trajectory-recording optimizer; carries the iterations
/// completed before the objective left the finite range so callers can still
/// persist the partial run.
template <typename TrajectoryT>
class DivergedWithTrajectory : public DivergedError {
public:
    DivergedWithTrajectory(const std::string& what, long iteration, TrajectoryT trajectory)
        : DivergedError(what, iteration), trajectory(std::move(trajectory)) {}
    TrajectoryT trajectory;
};

/// Raised by the file readers; `offset` is a byte offset for binary input
/// and a 1-based line number for text input.
class ParseError : public Error {
public:
    ParseError(const std::string& what, long long offset)
        : Error(what), offset(offset) {}
    long long offset;
};

}  // namespace matrixinfo
