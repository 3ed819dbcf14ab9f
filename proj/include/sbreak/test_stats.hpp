#pragma once

#include "sbreak/break_process.hpp"
#include "sbreak/cv_table.hpp"
#include "sbreak/functional.hpp"
#include "sbreak/har.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sbreak {

struct SupResult {
    double stat = 0.0;
    double gamma_hat = 0.0;
};

/// V^{-1/2} max Q; gamma_hat is the leftmost maximiser.
[[nodiscard]] SupResult sup_stat(const BreakProcess& bp, const HarEstimate& har);
/// V^{-1/2} times the grid mean of Q.
[[nodiscard]] double avg_stat(const BreakProcess& bp, const HarEstimate& har);
/// (sqrt 2 / c) log mean exp(c Q / sqrt(2 V)).
[[nodiscard]] double expq_stat(const BreakProcess& bp, const HarEstimate& har, double c);
/// log ExpW; does not use V.
[[nodiscard]] double expw_stat(const BreakProcess& bp, double c);

struct StatValue {
    double stat = 0.0;
    std::optional<double> gamma_hat;
};

/// Dispatches on spec.functional.
[[nodiscard]] StatValue compute_stat(const TestSpec& spec, const BreakProcess& bp, const HarEstimate& har);

struct TestReport {
    TestSpec spec;
    double statistic = 0.0;
    double v_hat = 1.0;
    std::map<double, double> critical_values;
    std::optional<double> p_value;
    std::map<double, bool> reject;
    std::optional<double> gamma_hat;
    std::string cv_source;
    std::vector<std::string> warnings;
};

/**
 * @brief Compares a statistic with simulated null draws.
 * @throws Error(FunctionalMismatch) when null.spec differs from spec.
 */
[[nodiscard]] TestReport decide(double stat, const TestSpec& spec, const NullDistribution& null,
                                const std::vector<double>& levels);

/// Sup/avg decision against tabulated asymptotic critical values (no p-value).
[[nodiscard]] TestReport decide_with_table(double stat, const TestSpec& spec, double gamma_star,
                                           const CriticalValueTable& table, const std::vector<double>& levels);

}  // namespace sbreak
