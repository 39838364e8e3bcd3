#include "hmk/error.hpp"

namespace hmk {

const char* errc_name(Errc c)
{
    switch (c) {
    case Errc::NonMonotoneBreakpoints: return "NonMonotoneBreakpoints";
    case Errc::MissingOrigin: return "MissingOrigin";
    case Errc::InvalidArc: return "InvalidArc";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::NotInForwardDomain: return "NotInForwardDomain";
    case Errc::MemoryTooShort: return "MemoryTooShort";
    case Errc::EmptyCloud: return "EmptyCloud";
    case Errc::NegativeRadius: return "NegativeRadius";
    case Errc::DomainMismatch: return "DomainMismatch";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::InvalidScale: return "InvalidScale";
    case Errc::NotInFlowSet: return "NotInFlowSet";
    case Errc::InitialDataNotInCD: return "InitialDataNotInCD";
    case Errc::ViabilityFailed: return "ViabilityFailed";
    case Errc::EmptyInterior: return "EmptyInterior";
    case Errc::EmptyTarget: return "EmptyTarget";
    case Errc::InvalidParam: return "InvalidParam";
    case Errc::InvalidDelays: return "InvalidDelays";
    case Errc::UsageError: return "UsageError";
    case Errc::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace hmk
