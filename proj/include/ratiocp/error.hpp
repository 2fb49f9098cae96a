#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ratiocp {

enum class ErrorCode {
    EmptyRange,       ///< trimmed k-range is empty for the given n and delta
    AllDegenerate,    ///< every candidate k gives a 0/0 ratio
    ZeroVariance,     ///< long-run variance estimate is zero
    InvalidSeries,    ///< non-finite observation
    TooShort,         ///< fewer than two observations
    InvalidSpec,      ///< generator or change specification violates its invariants
    ParseError,       ///< malformed input file
    VersionMismatch,  ///< critical-value table written by an unknown format version
    CorruptTable,     ///< critical-value table fails its invariants
    IoError,          ///< file could not be opened or written
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain error carrying a machine-readable code; the CLI maps these to exit status 2.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ratiocp
