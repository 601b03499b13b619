#pragma once

#include <stdexcept>
#include <string>

namespace circmax {

/// Error classes. Each class maps to a distinct CLI exit code (see harness/cli.h).
enum class ErrorKind {
    domain = 10,
    singularity,
    empty_curve,
    hypothesis,
    non_unique,
    geometry,
    precondition,
    degeneracy,
    regularity,
    sampling,
    resolution,
    separation,
    config,
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define CIRCMAX_DEFINE_ERROR(Name, kind_value)                                   \
    class Name : public Error {                                                   \
    public:                                                                       \
        explicit Name(const std::string& what) : Error(ErrorKind::kind_value, what) {} \
    };

CIRCMAX_DEFINE_ERROR(DomainError, domain)
CIRCMAX_DEFINE_ERROR(SingularityError, singularity)
CIRCMAX_DEFINE_ERROR(EmptyCurveError, empty_curve)
CIRCMAX_DEFINE_ERROR(HypothesisError, hypothesis)
CIRCMAX_DEFINE_ERROR(NonUniqueError, non_unique)
CIRCMAX_DEFINE_ERROR(GeometryError, geometry)
CIRCMAX_DEFINE_ERROR(PreconditionError, precondition)
CIRCMAX_DEFINE_ERROR(DegeneracyError, degeneracy)
CIRCMAX_DEFINE_ERROR(RegularityError, regularity)
CIRCMAX_DEFINE_ERROR(SamplingError, sampling)
CIRCMAX_DEFINE_ERROR(ResolutionError, resolution)
CIRCMAX_DEFINE_ERROR(SeparationError, separation)
CIRCMAX_DEFINE_ERROR(ConfigError, config)
CIRCMAX_DEFINE_ERROR(IoError, io)

#undef CIRCMAX_DEFINE_ERROR

}  // namespace circmax
