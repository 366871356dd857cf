#pragma once

#include <stdexcept>
#include <string>

namespace conlab {

enum class ErrorCode {
    SelfLoop,
    DuplicateEdge,
    IndexOutOfRange,
    Disconnected,
    NonFinite,
    NotSymmetric,
    SingularPrincipalBlock,
    NegativeWeight,
    InvalidCoupling,
    NotAvailable,
    RootFindingFailed,
    NotInCutSpace,
    CombinatorialBlowup,
    NotATree,
    NotACycle,
    NotPolynomial,
    NoConvergence,
    MissingTrivialKernel,
    GMinusDisconnected,
    DisconnectedUnion,
    BadDerivativeSigns,
    InvalidArgument,
    Schema,
};

[[nodiscard]] constexpr const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::SelfLoop: return "SelfLoop";
        case ErrorCode::DuplicateEdge: return "DuplicateEdge";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::Disconnected: return "Disconnected";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::SingularPrincipalBlock: return "SingularPrincipalBlock";
        case ErrorCode::NegativeWeight: return "NegativeWeight";
        case ErrorCode::InvalidCoupling: return "InvalidCoupling";
        case ErrorCode::NotAvailable: return "NotAvailable";
        case ErrorCode::RootFindingFailed: return "RootFindingFailed";
        case ErrorCode::NotInCutSpace: return "NotInCutSpace";
        case ErrorCode::CombinatorialBlowup: return "CombinatorialBlowup";
        case ErrorCode::NotATree: return "NotATree";
        case ErrorCode::NotACycle: return "NotACycle";
        case ErrorCode::NotPolynomial: return "NotPolynomial";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::MissingTrivialKernel: return "MissingTrivialKernel";
        case ErrorCode::GMinusDisconnected: return "GMinusDisconnected";
        case ErrorCode::DisconnectedUnion: return "DisconnectedUnion";
        case ErrorCode::BadDerivativeSigns: return "BadDerivativeSigns";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Schema: return "Schema";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace conlab
