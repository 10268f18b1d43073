#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kgds {

enum class ErrorKind {
    NonConvergence,
    InvalidParams,
    DomainViolation,
    DenominatorSingular,
    BracketFailure,
    CFLViolation,
    BoundaryContamination,
    QuadratureUnderResolved,
    NoContraction,
    HorizonExceeded,
    ConfigInvalid,
    IoError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace kgds
