#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sbreak {

/// Failure kinds raised by the library. Each maps onto one ErrorCategory.
enum class ErrorCode {
    NonFiniteInput,
    RankDeficient,
    SampleTooShort,
    BreakGridInfeasible,
    InvalidTrim,
    SingularVariance,
    SingularOmega,
    FunctionalMismatch,
    CatalogUnknown,
    NoCrossing,
    FileNotFound,
    ColumnMissing,
    NonNumericCell,
    InvalidConfig,
};

/// Coarse grouping used by the CLI to pick an exit code.
enum class ErrorCategory { Config, Data, Numerical };

[[nodiscard]] constexpr ErrorCategory category_of(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidTrim:
        case ErrorCode::FunctionalMismatch:
        case ErrorCode::CatalogUnknown:
        case ErrorCode::InvalidConfig:
            return ErrorCategory::Config;
        case ErrorCode::NonFiniteInput:
        case ErrorCode::SampleTooShort:
        case ErrorCode::BreakGridInfeasible:
        case ErrorCode::FileNotFound:
        case ErrorCode::ColumnMissing:
        case ErrorCode::NonNumericCell:
            return ErrorCategory::Data;
        case ErrorCode::RankDeficient:
        case ErrorCode::SingularVariance:
        case ErrorCode::SingularOmega:
        case ErrorCode::NoCrossing:
            return ErrorCategory::Numerical;
    }
    return ErrorCategory::Numerical;
}

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/**
 * @brief Exception carrying an ErrorCode and the module that raised it.
 *
 * what() is formatted as "<module>: <CodeName>: <detail>".
 */
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string_view module, const std::string& detail);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] ErrorCategory category() const noexcept { return category_of(code_); }
    [[nodiscard]] const std::string& module() const noexcept { return module_; }

private:
    ErrorCode code_;
    std::string module_;
};

}  // namespace sbreak
