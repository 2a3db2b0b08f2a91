// errors.hpp: error kinds raised by the library

#pragma once

#include <stdexcept>
#include <string>

namespace rabi {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    NonHermitian,
    AmplitudeTooLarge,
    SqueezeTooLarge,
    DisplacementTooLarge,
    EigDecompositionFailure,
    SectorRequired,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace rabi
