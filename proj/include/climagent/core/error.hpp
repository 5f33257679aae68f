#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace climagent {

enum class ErrorCode {
    InvalidArgument,
    ParseError,
    ConfigError,
    UnknownUnit,
    UnknownVariable,
    UnparseableTimestamp,
    SinkFailure,
    UnknownRegion,
    NoDataForDate,
    ProviderFailure,
    Timeout,
    HorizonTooLong,
    EmptyRange,
    NoImagery,
    MissingBand,
    ShapeMismatch,
    UnknownFactorKey,
    UnresolvableReference,
    DimensionMismatch,
    BackendFailure,
    NoRelevantResults,
    UnsupportedFormat,
    EmptyAfterCleaning,
    EmptyGrid,
    VariableAbsent,
    EmptySlice,
};

std::string_view to_string(ErrorCode code);

/// Exception type thrown across the library. The code is stable and is what
/// tool observations and CLI diagnostics report.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace climagent
