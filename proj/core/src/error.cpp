#include "kgds/error.hpp"

namespace kgds {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::DomainViolation: return "DomainViolation";
        case ErrorKind::DenominatorSingular: return "DenominatorSingular";
        case ErrorKind::BracketFailure: return "BracketFailure";
        case ErrorKind::CFLViolation: return "CFLViolation";
        case ErrorKind::BoundaryContamination: return "BoundaryContamination";
        case ErrorKind::QuadratureUnderResolved: return "QuadratureUnderResolved";
        case ErrorKind::NoContraction: return "NoContraction";
        case ErrorKind::HorizonExceeded: return "HorizonExceeded";
        case ErrorKind::ConfigInvalid: return "ConfigInvalid";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace kgds
