#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace sbreak {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/**
 * @brief Raw data: response y (length n) and covariates Z (n x k, k may be 0).
 */
struct RawSample {
    VectorXd y;
    MatrixXd z;

    [[nodiscard]] Index n() const noexcept { return y.size(); }
    [[nodiscard]] Index k() const noexcept { return z.cols(); }

    /// Throws NonFiniteInput / SampleTooShort when the invariants do not hold.
    void validate() const;
};

enum class DesignKind { PolynomialSieve, ArLags, RawColumns };

/**
 * @brief How raw data become the regressor vector x_t.
 *
 * PolynomialSieve(d): all monomials of total degree <= d in the covariates.
 * ArLags(q): x_t = (1, y_{t-1}, ..., y_{t-q}).
 * RawColumns: the covariate columns as given, optionally preceded by an intercept.
 */
struct DesignSpec {
    DesignKind kind = DesignKind::PolynomialSieve;
    int degree = 2;
    int ar_order = 1;
    bool include_intercept = true;

    [[nodiscard]] static DesignSpec polynomial(int degree);
    [[nodiscard]] static DesignSpec ar(int order);
    [[nodiscard]] static DesignSpec raw(bool include_intercept);

    /// Number of regressors produced for k covariates.
    [[nodiscard]] Index column_count(Index k) const;
    /// Rows dropped at the start of the sample (AR presample).
    [[nodiscard]] Index presample() const noexcept { return kind == DesignKind::ArLags ? ar_order : 0; }
    [[nodiscard]] std::string describe() const;
};

/// Regressor matrix with one row per effective observation.
struct DesignMatrix {
    MatrixXd x;
    std::vector<std::string> labels;

    [[nodiscard]] Index n_eff() const noexcept { return x.rows(); }
    [[nodiscard]] Index p() const noexcept { return x.cols(); }
};

/// A design together with the response aligned to its rows.
struct RegressionData {
    DesignMatrix design;
    VectorXd y;
};

/**
 * @brief Break-interacted design for one break fraction.
 *
 * Row t is (x_t', x_t' 1{t > split_index}) with t counted from 1, so the
 * second block is zero on the first split_index rows.
 */
struct SplitDesign {
    double gamma = 0.5;
    Index split_index = 0;
    MatrixXd x_gamma;

    [[nodiscard]] Index p() const noexcept { return x_gamma.cols() / 2; }
};

/// Exponent vectors of all monomials of total degree <= degree in k variables,
/// graded lexicographic (intercept first).
[[nodiscard]] std::vector<std::vector<int>> monomial_exponents(Index k, int degree);

[[nodiscard]] DesignMatrix build_polynomial_basis(const MatrixXd& z, int degree);

/// Lag embedding; returns the design and y_eff = (y_{q+1}, ..., y_n).
[[nodiscard]] RegressionData build_ar_design(const VectorXd& y, int order);

[[nodiscard]] DesignMatrix build_raw_design(const MatrixXd& z, bool include_intercept);

/// Dispatches on spec.kind.
[[nodiscard]] RegressionData build_design(const RawSample& sample, const DesignSpec& spec);

/// floor(n_eff * gamma), guarded against representation error in gamma.
[[nodiscard]] Index split_index_for(Index n_eff, double gamma);

/// True when both regimes keep at least p + 2 rows.
[[nodiscard]] bool split_feasible(Index n_eff, Index p, double gamma);

[[nodiscard]] SplitDesign split_design(const DesignMatrix& design, double gamma);

}  // namespace sbreak
