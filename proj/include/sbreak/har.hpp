#pragma once

#include "sbreak/design.hpp"
#include "sbreak/regression.hpp"

#include <string>
#include <vector>

namespace sbreak {

enum class KernelKind { Parzen, Bartlett, None };

struct KernelSpec {
    KernelKind kind = KernelKind::Parzen;
    double a0 = 14.0;
};

/// LastObs: zeta_t = p^{-1/2} xi_n' xi_t. OnesVector: zeta_t = p^{-1/2} sum_i xi_ti.
enum class ZetaMode { LastObs, OnesVector };

/// Lower bound applied to V-hat before it is used as a divisor.
inline constexpr double kVHatFloor = 1e-4;

struct HarEstimate {
    double v_hat = 1.0;
    /// V-hat before flooring.
    double v_raw = 1.0;
    Index bandwidth = 0;
    KernelSpec kernel;
    ZetaMode zeta_mode = ZetaMode::OnesVector;
    VectorXd zeta;
    bool floored = false;
};

[[nodiscard]] double kernel_value(KernelKind kind, double x) noexcept;

/// floor(n^{1/r}) computed exactly on integers.
[[nodiscard]] Index integer_root(Index n, int r) noexcept;

/// a0 * floor(n^{1/5}) for Parzen, a0 * floor(n^{1/3}) for Bartlett (rounded, at least 1); 0 for None.
[[nodiscard]] Index bandwidth(const KernelSpec& spec, Index n_eff);

/**
 * @brief Scalar series whose long-run variance estimates the correction factor.
 *
 * xi_t = Omega^{-1/2} x_t e_t with the symmetric square root.
 * @throws Error(SingularOmega) when Omega is not positive definite.
 */
[[nodiscard]] VectorXd zeta_series(const MatrixXd& x, const VectorXd& eps_hat, const MatrixXd& omega_hat,
                                   ZetaMode mode);

/// Autocovariance n^{-1} sum_{t=1}^{n-j} zeta_t zeta_{t+j}, compensated summation.
[[nodiscard]] double autocovariance(const VectorXd& zeta, Index lag);

/// Kernel-weighted sum of autocovariances with divisor n for every lag.
[[nodiscard]] HarEstimate v_hat(const VectorXd& zeta, const KernelSpec& spec);

/// Full-sample no-break fit, zeta series, and V-hat.
[[nodiscard]] HarEstimate estimate_har(const DesignMatrix& x, const VectorXd& y, VarianceMode mode,
                                       const KernelSpec& spec, ZetaMode zeta_mode);

[[nodiscard]] std::string to_string(KernelKind kind);
[[nodiscard]] std::string to_string(ZetaMode mode);

}  // namespace sbreak
