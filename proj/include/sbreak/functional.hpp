#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sbreak {

enum class Functional { Sup, Avg, ExpQ, ExpW };

/// Functional applied to a process path; c is used by ExpQ and ExpW only.
struct TestSpec {
    Functional functional = Functional::Sup;
    double c = 15.0;

    [[nodiscard]] static TestSpec sup() { return {Functional::Sup, 15.0}; }
    [[nodiscard]] static TestSpec avg() { return {Functional::Avg, 15.0}; }
    [[nodiscard]] static TestSpec expq(double c) { return {Functional::ExpQ, c}; }
    [[nodiscard]] static TestSpec expw(double c) { return {Functional::ExpW, c}; }

    /// Throws InvalidConfig when c <= 0 for ExpQ/ExpW.
    void validate() const;
    [[nodiscard]] bool same_as(const TestSpec& other) const noexcept;
    [[nodiscard]] std::string describe() const;
};

/// Parses "sup", "avg", "expq", "expw" (c supplied separately).
[[nodiscard]] Functional parse_functional(const std::string& name);
[[nodiscard]] std::string to_string(Functional f);

/// log(mean(exp(a))) evaluated without overflow.
[[nodiscard]] double log_mean_exp(const double* a, std::size_t n);

struct PathMax {
    double value = 0.0;
    std::size_t index = 0;
};

/// Maximum and leftmost argmax.
[[nodiscard]] PathMax path_max(const double* q, std::size_t n);
[[nodiscard]] double path_mean(const double* q, std::size_t n);
/// (sqrt 2 / c) log mean exp(c q / sqrt(2 v)).
[[nodiscard]] double path_expq(const double* q, std::size_t n, double v, double c);
/// -(p/2) log(1 + c/sqrt p) + log mean exp(0.5 a/(1+a) W), a = c/sqrt p.
[[nodiscard]] double path_log_expw(const double* w, std::size_t n, double p, double c);

/**
 * @brief Sorted simulated draws of a null functional.
 *
 * Quantiles use linear interpolation between order statistics (type 7).
 */
struct NullDistribution {
    TestSpec spec;
    double gamma_star = 0.35;
    /// Regressor count used by ExpW nulls; 0 otherwise.
    long p = 0;
    long resolution = 0;
    long reps = 0;
    std::uint64_t seed = 0;
    std::string construction;
    std::vector<double> draws;

    void finalize();
    [[nodiscard]] double quantile(double prob) const;
    /// Upper-tail critical value at the given level.
    [[nodiscard]] double critical_value(double level) const { return quantile(1.0 - level); }
    /// (1 + #{draws >= stat}) / (1 + reps).
    [[nodiscard]] double p_value(double stat) const;
};

[[nodiscard]] double quantile_type7(const std::vector<double>& sorted, double prob);

}  // namespace sbreak
