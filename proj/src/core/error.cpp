#include "climagent/core/error.hpp"

namespace climagent {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::ParseError: return "parse_error";
        case ErrorCode::ConfigError: return "config_error";
        case ErrorCode::UnknownUnit: return "unknown_unit";
        case ErrorCode::UnknownVariable: return "unknown_variable";
        case ErrorCode::UnparseableTimestamp: return "unparseable_timestamp";
        case ErrorCode::SinkFailure: return "sink_failure";
        case ErrorCode::UnknownRegion: return "unknown_region";
        case ErrorCode::NoDataForDate: return "no_data_for_date";
        case ErrorCode::ProviderFailure: return "provider_failure";
        case ErrorCode::Timeout: return "timeout";
        case ErrorCode::HorizonTooLong: return "horizon_too_long";
        case ErrorCode::EmptyRange: return "empty_range";
        case ErrorCode::NoImagery: return "no_imagery";
        case ErrorCode::MissingBand: return "missing_band";
        case ErrorCode::ShapeMismatch: return "shape_mismatch";
        case ErrorCode::UnknownFactorKey: return "unknown_factor_key";
        case ErrorCode::UnresolvableReference: return "unresolvable_reference";
        case ErrorCode::DimensionMismatch: return "dimension_mismatch";
        case ErrorCode::BackendFailure: return "backend_failure";
        case ErrorCode::NoRelevantResults: return "no_relevant_results";
        case ErrorCode::UnsupportedFormat: return "unsupported_format";
        case ErrorCode::EmptyAfterCleaning: return "empty_after_cleaning";
        case ErrorCode::EmptyGrid: return "empty_grid";
        case ErrorCode::VariableAbsent: return "variable_absent";
        case ErrorCode::EmptySlice: return "empty_slice";
    }
    return "unknown";
}

}  // namespace climagent
