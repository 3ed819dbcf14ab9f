#pragma once

#include "sbreak/break_process.hpp"
#include "sbreak/cv_table.hpp"
#include "sbreak/design.hpp"
#include "sbreak/functional.hpp"
#include "sbreak/har.hpp"
#include "sbreak/null_sim.hpp"
#include "sbreak/rng.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sbreak {

enum class InnovationKind { IidNormal, Arch1, Garch11 };

/**
 * @brief Error process v_t.
 *
 * ARCH(1): s2_t = omega + alpha v_{t-1}^2. GARCH(1,1): s2_t = omega + alpha
 * v_{t-1}^2 + beta s2_{t-1}. Recursions start at the unconditional variance
 * and discard burn_in draws.
 */
struct InnovationSpec {
    InnovationKind kind = InnovationKind::IidNormal;
    double omega = 0.1;
    double alpha = 0.5;
    double beta = 0.0;
    long burn_in = 200;

    [[nodiscard]] static InnovationSpec iid();
    [[nodiscard]] static InnovationSpec arch1(double omega = 0.1, double alpha = 0.5);
    [[nodiscard]] static InnovationSpec garch11(double omega = 0.1, double alpha = 0.25, double beta = 0.4);

    void validate() const;
    [[nodiscard]] double unconditional_variance() const noexcept;
    [[nodiscard]] std::string describe() const;
};

[[nodiscard]] InnovationSpec parse_innovation(const std::string& name);

/// Covariates (z2, z3) with z2 = (w1 + w2)/2, z3 = (w1 + w3)/2, w ~ U(0, 5).
[[nodiscard]] MatrixXd gen_covariates(Index n, RandomStream& rng);

[[nodiscard]] VectorXd gen_innovations(const InnovationSpec& spec, Index n, RandomStream& rng);

/**
 * @brief A catalogue design.
 *
 * Names: DGP1..DGP7, ARDGP1..ARDGP3, H0..H6 (H0 is the null of the H family),
 * RHO:<rho>:<p>.
 */
struct DgpSpec {
    std::string name = "DGP1";
    Index n = 300;
    InnovationSpec innovation;

    void validate() const;
};

struct SimulatedSample {
    RawSample sample;
    std::vector<double> break_fractions;
    /// True for the AR catalogue, whose samples carry no covariates.
    bool autoregressive = false;
};

/// @throws Error(CatalogUnknown) for names outside the catalogue.
[[nodiscard]] SimulatedSample gen_dgp(const DgpSpec& spec, RandomStream& rng);

/// Design the catalogue uses by default: quadratic sieve, raw columns for RHO, AR(8) for ARDGP.
[[nodiscard]] DesignSpec default_design_for(const std::string& dgp_name);

/// 2^{1/4} p^{1/4} n^{-1/2} tau / |tau|.
[[nodiscard]] VectorXd local_power_break(const VectorXd& tau, Index p, Index n);

enum class CvSource { Table, Simulate };

struct ExperimentConfig {
    DgpSpec dgp;
    DesignSpec design = DesignSpec::polynomial(2);
    double gamma_star = 0.35;
    double step = 1.0 / 200.0;
    VarianceMode variance = VarianceMode::Homoskedastic;
    ZetaMode zeta = ZetaMode::OnesVector;
    std::vector<KernelSpec> kernels{KernelSpec{KernelKind::Parzen, 14.0}};
    std::vector<TestSpec> tests{TestSpec::sup()};
    std::vector<double> levels{0.01, 0.05, 0.10};
    long reps = 500;
    std::uint64_t seed = 1;
    CvSource cv_source = CvSource::Table;
    long null_reps = 10000;
    long null_resolution = 3600;
    PathConstruction construction = PathConstruction::OrnsteinUhlenbeck;
    unsigned threads = 0;
    bool keep_draws = false;

    void validate() const;
    /// Canonical one-line description; thread count excluded.
    [[nodiscard]] std::string canonical() const;
    [[nodiscard]] std::uint64_t hash() const;
};

struct CellKey {
    std::string test;
    std::string kernel;
    double a0 = 0.0;
    double level = 0.0;

    [[nodiscard]] bool operator<(const CellKey& o) const noexcept;
};

struct ExperimentCell {
    CellKey key;
    double critical_value = 0.0;
    long rejections = 0;
    long valid = 0;
    [[nodiscard]] double rate() const noexcept { return valid > 0 ? static_cast<double>(rejections) / valid : 0.0; }
};

struct ExperimentResult {
    ExperimentConfig config;
    Index p = 0;
    std::vector<ExperimentCell> cells;
    long failures = 0;
    std::map<std::string, long> failure_codes;
    /// Per kernel, V-hat of each successful replication (replication order).
    std::vector<std::vector<double>> v_hats;
    /// Per (test, kernel) in cell order, statistic of each replication; filled when keep_draws.
    std::map<std::string, std::vector<double>> draws;

    [[nodiscard]] const ExperimentCell& cell(const std::string& test, KernelKind kind, double a0, double level) const;
    [[nodiscard]] std::string to_csv() const;
    [[nodiscard]] std::string to_text() const;
};

[[nodiscard]] std::string kernel_label(const KernelSpec& k);

/// Deterministic under a fixed seed; independent of the thread count.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& config);

struct EnvelopeConfig {
    Index n = 300;
    int degree = 2;
    double gamma_star = 0.35;
    double step = 1.0 / 200.0;
    long reps = 300;
    long null_reps = 2000;
    double level = 0.05;
    double c_min = 0.05;
    double c_max = 30.0;
    double c_step = 0.05;
    std::uint64_t seed = 7;
    unsigned threads = 0;

    void validate() const;
    [[nodiscard]] std::string canonical() const;
};

struct EnvelopeResult {
    EnvelopeConfig config;
    Index p = 0;
    std::vector<double> c;
    std::vector<double> power;
    std::vector<double> critical_value;
    std::optional<double> solution;

    [[nodiscard]] std::string to_csv() const;
};

/**
 * @brief Power of the ExpW(c) test against the weighted alternative indexed by c.
 *
 * Homoskedastic Wald processes; the critical value for each c is the
 * (1 - level) quantile of ExpW(c) over null samples of the same design.
 */
[[nodiscard]] EnvelopeResult power_curve(const EnvelopeConfig& config);

/// Smallest c with power >= 1/2, linearly interpolated.
/// @throws Error(NoCrossing) when the curve never reaches 1/2.
[[nodiscard]] EnvelopeResult power_envelope(const EnvelopeConfig& config);

/// 64-bit FNV-1a.
[[nodiscard]] std::uint64_t fnv1a(const std::string& text) noexcept;
[[nodiscard]] std::string hex64(std::uint64_t v);

}  // namespace sbreak
