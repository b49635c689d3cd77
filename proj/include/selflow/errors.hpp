#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace selflow {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fields or operators attached to different grids.
class ShapeError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Ball or window does not fit inside the domain.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Pressure solve did not reach the requested divergence tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double achieved)
        : Error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Non-finite values appeared during time stepping.
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, std::size_t step, double time)
        : Error(what), step_(step), time_(time) {}
    std::size_t step() const noexcept { return step_; }
    double time() const noexcept { return time_; }

private:
    std::size_t step_;
    double time_;
};

/// Requested time step exceeds the explicit stability bound.
class StabilityError : public Error {
public:
    StabilityError(const std::string& what, double requested, double bound)
        : Error(what), requested_(requested), bound_(bound) {}
    double requested() const noexcept { return requested_; }
    double bound() const noexcept { return bound_; }

private:
    double requested_;
    double bound_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace selflow
