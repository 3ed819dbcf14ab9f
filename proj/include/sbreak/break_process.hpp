#pragma once

#include "sbreak/design.hpp"
#include "sbreak/regression.hpp"

#include <cmath>
#include <vector>

namespace sbreak {

/// Candidate break fractions gamma_star, gamma_star + step, ... <= 1 - gamma_star.
struct BreakGrid {
    double gamma_star = 0.35;
    double step = 1.0 / 200.0;
    std::vector<double> points;

    [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
};

/**
 * @brief Wald process over a break grid.
 *
 * q[i] = (wald[i] - p) / sqrt(2p). delta2[i] is the estimated shift in the
 * coefficients after the break at grid point i.
 */
struct BreakProcess {
    BreakGrid grid;
    std::vector<double> wald;
    std::vector<double> q;
    std::vector<VectorXd> delta2;
    std::vector<double> ssr;
    Index p = 0;
    Index n_eff = 0;
    VarianceMode mode = VarianceMode::EickerWhite;
    /// Least-squares break estimate: leftmost minimiser of the split SSR.
    double gamma_ssr = 0.0;
};

struct WaldResult {
    double wald = 0.0;
    VectorXd delta2;
    double ssr = 0.0;
};

/// @throws Error(InvalidTrim) unless 0 < gamma_star < 0.5 and 0 < step <= gamma_star.
[[nodiscard]] BreakGrid make_grid(double gamma_star, double step = 1.0 / 200.0);

/// (W - p) / sqrt(2p).
[[nodiscard]] inline double recentre(double wald, Index p) noexcept {
    const double pd = static_cast<double>(p);
    return (wald - pd) / std::sqrt(2.0 * pd);
}

/**
 * @brief Wald statistic for delta2 = 0 on one split design.
 *
 * Uses Cholesky solves of M and of B = R M^{-1} Omega M^{-1} R'.
 * @throws Error(SingularVariance) when B is not numerically positive definite.
 */
[[nodiscard]] WaldResult wald_at(const SplitDesign& split, const VectorXd& y, VarianceMode mode);

/// Sweeps the grid. threads = 1 runs sequentially; results do not depend on threads.
[[nodiscard]] BreakProcess compute_break_process(const DesignMatrix& x, const VectorXd& y, const BreakGrid& grid,
                                                 VarianceMode mode, unsigned threads = 1);

}  // namespace sbreak
