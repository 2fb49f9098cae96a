#include "ratiocp/error.hpp"

namespace ratiocp {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptyRange: return "EmptyRange";
        case ErrorCode::AllDegenerate: return "AllDegenerate";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::InvalidSeries: return "InvalidSeries";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::CorruptTable: return "CorruptTable";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace ratiocp
