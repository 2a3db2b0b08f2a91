#include "rabi/errors.hpp"

namespace rabi {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::AmplitudeTooLarge: return "AmplitudeTooLarge";
    case ErrorCode::SqueezeTooLarge: return "SqueezeTooLarge";
    case ErrorCode::DisplacementTooLarge: return "DisplacementTooLarge";
    case ErrorCode::EigDecompositionFailure: return "EigDecompositionFailure";
    case ErrorCode::SectorRequired: return "SectorRequired";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

} // namespace rabi
