#pragma once

#include <stdexcept>
#include <string>

namespace critloc {

enum class ErrorCode {
    InvalidArgument,
    DegenerateBasis,
    NonManifold,
    NonOrientable,
    DegenerateFace,
    ResourceLimit,
    FragmentedLocus,
    IndexOutOfRange,
    SchemeInvalid,
    AngleMismatch,
    BumpOverlap,
    ParseError,
    IoError,
};

struct Error : std::runtime_error {
    ErrorCode code;
    Error(ErrorCode c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

[[noreturn]] inline void fail(ErrorCode c, const std::string& msg) { throw Error(c, msg); }

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DegenerateBasis: return "DegenerateBasis";
        case ErrorCode::NonManifold: return "NonManifold";
        case ErrorCode::NonOrientable: return "NonOrientable";
        case ErrorCode::DegenerateFace: return "DegenerateFace";
        case ErrorCode::ResourceLimit: return "ResourceLimit";
        case ErrorCode::FragmentedLocus: return "FragmentedLocus";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::SchemeInvalid: return "SchemeInvalid";
        case ErrorCode::AngleMismatch: return "AngleMismatch";
        case ErrorCode::BumpOverlap: return "BumpOverlap";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace critloc
