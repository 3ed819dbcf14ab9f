#pragma once

#include "sbreak/break_process.hpp"
#include "sbreak/design.hpp"
#include "sbreak/har.hpp"
#include "sbreak/null_sim.hpp"
#include "sbreak/test_stats.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sbreak {

/// Version of the JSON report layout written by report_json.
inline constexpr int kReportSchemaVersion = 1;

enum class CriticalValueMode { Bundled, Simulate };

struct RunConfig {
    std::string input;
    std::string response = "y";
    std::vector<std::string> covariates;
    DesignSpec design = DesignSpec::polynomial(2);
    double gamma_star = 0.35;
    double step = 1.0 / 200.0;
    VarianceMode variance = VarianceMode::Homoskedastic;
    KernelSpec kernel{KernelKind::Parzen, 14.0};
    ZetaMode zeta = ZetaMode::OnesVector;
    TestSpec test = TestSpec::sup();
    std::vector<double> levels{0.01, 0.05, 0.10};
    CriticalValueMode cv_mode = CriticalValueMode::Bundled;
    long null_reps = 10000;
    long null_resolution = 3600;
    std::uint64_t null_seed = 20240501;
    PathConstruction construction = PathConstruction::OrnsteinUhlenbeck;
    unsigned threads = 0;

    /// Throws InvalidConfig for inconsistent settings (e.g. AR design with covariates).
    void validate() const;
    /// Canonical description; thread count excluded.
    [[nodiscard]] std::string canonical() const;
    [[nodiscard]] std::uint64_t hash() const;
};

struct PipelineResult {
    RunConfig config;
    Index n = 0;
    std::vector<std::string> labels;
    BreakProcess process;
    HarEstimate har;
    TestReport report;
};

/// Design, break process, V-hat, statistic and decision for an in-memory sample.
[[nodiscard]] PipelineResult run_pipeline(const RawSample& sample, const RunConfig& config);

/// Reads config.input and runs the pipeline.
[[nodiscard]] PipelineResult run_test(const RunConfig& config);

[[nodiscard]] std::string report_json(const PipelineResult& result);
[[nodiscard]] std::string report_text(const PipelineResult& result);
/// Rows (gamma, wald, q).
[[nodiscard]] std::string plot_csv(const PipelineResult& result);

}  // namespace sbreak
