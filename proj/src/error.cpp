#include "sbreak/error.hpp"

namespace sbreak {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::SampleTooShort: return "SampleTooShort";
        case ErrorCode::BreakGridInfeasible: return "BreakGridInfeasible";
        case ErrorCode::InvalidTrim: return "InvalidTrim";
        case ErrorCode::SingularVariance: return "SingularVariance";
        case ErrorCode::SingularOmega: return "SingularOmega";
        case ErrorCode::FunctionalMismatch: return "FunctionalMismatch";
        case ErrorCode::CatalogUnknown: return "CatalogUnknown";
        case ErrorCode::NoCrossing: return "NoCrossing";
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::ColumnMissing: return "ColumnMissing";
        case ErrorCode::NonNumericCell: return "NonNumericCell";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, std::string_view module, const std::string& detail)
    : std::runtime_error(std::string(module) + ": " + std::string(to_string(code)) + ": " + detail),
      code_(code),
      module_(module) {}

}  // namespace sbreak
