#ifndef AQC_ERRORS_HPP
#define AQC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace aqc {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed instance: bad clause indices, duplicate clauses, inconsistent file.
class InvalidInstanceError : public Error {
public:
    using Error::Error;
};

// Bad caller-supplied parameter (ranges, counts, empty target sets).
class InvalidParameterError : public Error {
public:
    using Error::Error;
};

// Problem size exceeds a hard guard (state vectors, dense oracles).
class CapacityError : public Error {
public:
    using Error::Error;
};

// Instance generator exhausted its retry budget.
class GenerationError : public Error {
public:
    using Error::Error;
};

// Integrator finished outside its accuracy contract.  Norm drift is the
// diagnostic; the run is rejected rather than renormalized.
class IntegrationAccuracyError : public Error {
public:
    IntegrationAccuracyError(const std::string& what, double drift,
                             std::int64_t steps, double dt)
        : Error(what), norm_drift(drift), steps(steps), dt(dt) {}

    double norm_drift;
    std::int64_t steps;
    double dt;
};

// Time search ran off the end of its doubling range.
class TimeSearchError : public Error {
public:
    using Error::Error;
};

}  // namespace aqc

#endif
