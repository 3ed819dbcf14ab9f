#pragma once

#include "sbreak/design.hpp"

#include <optional>

namespace sbreak {

/// Least-squares fit of y on the columns of a design.
struct OlsFit {
    VectorXd coef;
    VectorXd residuals;
    double rss = 0.0;
};

enum class VarianceMode { EickerWhite, Homoskedastic };

/**
 * @brief Second-moment matrices of a (split) regression.
 *
 * m_hat = n^{-1} X'X. omega_hat is either the Eicker-White sandwich meat
 * n^{-1} sum x_t x_t' e_t^2 or sigma2_hat * m_hat.
 */
struct MomentMatrices {
    MatrixXd m_hat;
    MatrixXd omega_hat;
    VarianceMode mode = VarianceMode::EickerWhite;
    std::optional<double> sigma2_hat;
};

/// Singular values of X (descending), via the R factor of a Householder QR.
[[nodiscard]] VectorXd singular_values(const MatrixXd& x);

/// Rank tolerance used everywhere: max(rows, cols) * eps * sigma_max.
[[nodiscard]] double rank_tolerance(Index rows, Index cols, double sigma_max) noexcept;

/// Throws RankDeficient (reporting the smallest singular value) if X is
/// numerically rank-deficient.
void require_full_column_rank(const MatrixXd& x, std::string_view module);

/**
 * @brief OLS by column-pivoted Householder QR.
 * @throws Error(RankDeficient) when X has numerically dependent columns.
 * @throws Error(NonFiniteInput) on NaN/Inf in X or y.
 */
[[nodiscard]] OlsFit ols(const MatrixXd& x, const VectorXd& y);

[[nodiscard]] MomentMatrices moment_matrices(const MatrixXd& x, const VectorXd& residuals, VarianceMode mode);

[[nodiscard]] inline MomentMatrices moment_matrices(const SplitDesign& split, const OlsFit& fit,
                                                    VarianceMode mode) {
    return moment_matrices(split.x_gamma, fit.residuals, mode);
}

}  // namespace sbreak
