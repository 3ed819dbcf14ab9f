#pragma once

#include "sbreak/cv_table.hpp"
#include "sbreak/functional.hpp"
#include "sbreak/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sbreak {

/**
 * @brief How limit paths are generated.
 *
 * OrnsteinUhlenbeck: exact Gaussian recursion for Q, a unit-variance OU
 * process in logit time (the covariance implied by the (W, Wbar) kernel).
 * WhiteNoise: (W, Wbar) as Gaussian set functions of white noise on the
 * triangle {u < s}, then Q from the pair. O(N^2) per path.
 * Ito: W = sqrt2 int B dB by left-point sums. Matches the covariance but is
 * not Gaussian.
 * Pointwise: independent N(0,1) at every grid point. Diagnostic only.
 */
enum class PathConstruction { OrnsteinUhlenbeck, WhiteNoise, Ito, Pointwise };

[[nodiscard]] PathConstruction parse_construction(const std::string& name);
[[nodiscard]] std::string to_string(PathConstruction c);

struct LimitPathConfig {
    long resolution = 3600;
    double gamma_star = 0.35;
    long reps = 10000;
    std::uint64_t seed = 20240501;
    PathConstruction construction = PathConstruction::OrnsteinUhlenbeck;
    unsigned threads = 0;

    /// Throws InvalidConfig / InvalidTrim when out of range.
    void validate() const;
};

struct BesselConfig {
    long p = 1;
    long resolution = 200;
    long reps = 10000;
    std::uint64_t seed = 20240501;
    unsigned threads = 0;
};

/// Fractions j/N inside [gamma_star, 1 - gamma_star], with both endpoints included.
[[nodiscard]] std::vector<double> limit_grid(long resolution, double gamma_star);

/// W and Wbar at k/N, k = 0..N.
struct WPair {
    std::vector<double> w;
    std::vector<double> wbar;
};

[[nodiscard]] WPair simulate_w_pair_white_noise(long resolution, RandomStream& rng);
[[nodiscard]] WPair simulate_w_pair_ito(long resolution, RandomStream& rng);

/// W(g)/g + Wbar(g)/(1-g) - W(1) at grid indices k (fractions k/N).
[[nodiscard]] std::vector<double> q_from_pair(const WPair& pair, long resolution, const std::vector<long>& indices);

/// One draw of Q on limit_grid(config.resolution, config.gamma_star).
[[nodiscard]] std::vector<double> simulate_q_path(const LimitPathConfig& config, RandomStream& rng);

/// Exact OU draw of Q at the given increasing fractions.
[[nodiscard]] std::vector<double> simulate_q_ou(const std::vector<double>& gammas, RandomStream& rng);

/**
 * @brief Null draws of sup/avg/ExpQ functionals of Q, one distribution per spec.
 *
 * Every spec is evaluated on the same paths. Replication r uses stream r of
 * config.seed, so results do not depend on the thread count.
 * @throws Error(FunctionalMismatch) for ExpW (use simulate_expw_null).
 */
[[nodiscard]] std::vector<NullDistribution> simulate_null(const LimitPathConfig& config,
                                                          const std::vector<TestSpec>& specs);

[[nodiscard]] NullDistribution critical_values(const LimitPathConfig& config, const TestSpec& spec);

/// Sup/avg critical values for each trimming value (one simulation per trimming).
[[nodiscard]] CriticalValueTable critical_value_table(const std::vector<double>& gamma_stars,
                                                      const std::vector<double>& levels, LimitPathConfig config);

/// Tied-down Bessel process |B_p(g) - g B_p(1)|^2 / (g(1-g)) at the given fractions.
[[nodiscard]] std::vector<double> simulate_bessel_path(long p, const std::vector<double>& gammas, RandomStream& rng);

/// Sup of the Bessel process over limit_grid(resolution, gamma_star); standardized
/// returns sup (W_p - p)/sqrt(2p) instead.
[[nodiscard]] NullDistribution simulate_bessel_sup(const BesselConfig& config, double gamma_star,
                                                   bool standardized = false);

/// Null draws of log ExpW(c) built from the Bessel process of dimension p.
[[nodiscard]] NullDistribution simulate_expw_null(const BesselConfig& config, double gamma_star, double c);

/// (c - p) sqrt(v / (2p)).
[[nodiscard]] double andrews_transform(double c_fixed_p, long p, double v_hat);
/// c sqrt(2p / v) + p.
[[nodiscard]] double andrews_inverse(double c_star, long p, double v_hat);

}  // namespace sbreak
