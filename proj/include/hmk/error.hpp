#pragma once

#include <stdexcept>
#include <string>

namespace hmk {

enum class Errc {
    NonMonotoneBreakpoints,
    MissingOrigin,
    InvalidArc,
    OutOfDomain,
    NotInForwardDomain,
    MemoryTooShort,
    EmptyCloud,
    NegativeRadius,
    DomainMismatch,
    PreconditionViolated,
    InvalidScale,
    NotInFlowSet,
    InitialDataNotInCD,
    ViabilityFailed,
    EmptyInterior,
    EmptyTarget,
    InvalidParam,
    InvalidDelays,
    UsageError,
    IoError
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc c, const std::string& what)
        : std::runtime_error(std::string(errc_name(c)) + ": " + what), code_(c) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

}  // namespace hmk
