#pragma once

#include "sbreak/montecarlo.hpp"

#include <string>
#include <vector>

namespace sbreak {

// Value parsers shared by the experiment file format and the CLI flags.

/// "poly:<d>", "ar:<q>", "raw", "raw-nointercept".
[[nodiscard]] DesignSpec parse_design(const std::string& text);
/// "ew" or "homo".
[[nodiscard]] VarianceMode parse_variance(const std::string& text);
[[nodiscard]] std::string to_string(VarianceMode mode);
/// "last-obs" or "ones-vector".
[[nodiscard]] ZetaMode parse_zeta(const std::string& text);
/// "parzen:14", "bartlett:8", "none".
[[nodiscard]] KernelSpec parse_kernel(const std::string& text);
/// Comma-separated kernels.
[[nodiscard]] std::vector<KernelSpec> parse_kernels(const std::string& text);
/// "sup", "avg", "expq:<c>", "expw:<c>" (c defaults to 15).
[[nodiscard]] TestSpec parse_test(const std::string& text);
[[nodiscard]] std::vector<TestSpec> parse_tests(const std::string& text);
[[nodiscard]] std::vector<double> parse_levels(const std::string& text);

/**
 * @brief Reads an experiment from "key = value" lines.
 *
 * Blank lines and text after '#' are ignored. Keys: dgp, n, reps, seed,
 * innovation (iid|arch|garch), arch_omega, arch_alpha, garch_omega,
 * garch_alpha, garch_beta, burn_in, design, gamma_star, step, variance,
 * zeta, kernels, tests, levels, cv (table|simulate), null_reps,
 * null_resolution, construction, threads. Unknown keys are an error.
 */
[[nodiscard]] ExperimentConfig parse_experiment_config(const std::string& text);
[[nodiscard]] ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace sbreak
