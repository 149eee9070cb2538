#pragma once

#include <stdexcept>
#include <string>

namespace kamnf {

// Base class for every engine failure; subcommands catch this and turn it
// into a structured failure report with a nonzero exit code.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateMonomial : Error {
    using Error::Error;
};
struct MixedClassInput : Error {
    using Error::Error;
};
struct DegreeOverflow : Error {
    using Error::Error;
};
struct ModeOutOfRange : Error {
    using Error::Error;
};
struct ResonantLeak : Error {
    using Error::Error;
};
struct NoDecay : Error {
    using Error::Error;
};
struct EnumerationTooLarge : Error {
    using Error::Error;
};
struct ScheduleViolation : Error {
    using Error::Error;
};
struct CapTooSmall : Error {
    using Error::Error;
};
struct NormDiverges : Error {
    using Error::Error;
};
struct NoConvergence : Error {
    using Error::Error;
};
struct IntegratorFailure : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

// Carries the worst offending divisor so the caller can report which
// monomial broke the run.
struct SmallDivisorViolation : Error {
    double divisor;
    double floor;
    std::string monomial_id;
    SmallDivisorViolation(const std::string& id, double div, double flr)
        : Error("small divisor " + std::to_string(div) + " below floor " +
                std::to_string(flr) + " at " + id),
          divisor(div),
          floor(flr),
          monomial_id(id) {}
};

struct CertificationFailure : Error {
    std::string bound_name;
    double measured;
    double allowed;
    CertificationFailure(const std::string& name, double meas, double allow)
        : Error("certification failed: " + name + " measured " +
                std::to_string(meas) + " > allowed " + std::to_string(allow)),
          bound_name(name),
          measured(meas),
          allowed(allow) {}
};

}  // namespace kamnf
