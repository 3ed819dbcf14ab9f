#pragma once

// Brute-force reference implementations used as test oracles. Everything here
// is written with explicit loops and explicit inverses on purpose. Only the
// kernel weights are taken from the library.

#include "sbreak/design.hpp"
#include "sbreak/error.hpp"
#include "sbreak/har.hpp"
#include "sbreak/regression.hpp"
#include "sbreak/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>

namespace oracle {

using sbreak::Index;
using sbreak::MatrixXd;
using sbreak::VectorXd;

inline MatrixXd random_matrix(Index rows, Index cols, std::uint64_t seed) {
    sbreak::RandomStream rng(seed, 0);
    MatrixXd m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

inline VectorXd random_vector(Index n, std::uint64_t seed) {
    sbreak::RandomStream rng(seed, 1);
    VectorXd v(n);
    for (Index i = 0; i < n; ++i) v(i) = rng.normal();
    return v;
}

/// Design with an intercept column followed by standard normal columns.
inline sbreak::DesignMatrix random_design(Index n, Index p, std::uint64_t seed) {
    sbreak::DesignMatrix d;
    d.x = random_matrix(n, p, seed);
    d.x.col(0).setOnes();
    for (Index j = 0; j < p; ++j) d.labels.push_back("c" + std::to_string(j));
    return d;
}

inline MatrixXd transpose_times(const MatrixXd& a, const MatrixXd& b) {
    MatrixXd out = MatrixXd::Zero(a.cols(), b.cols());
    for (Index i = 0; i < a.cols(); ++i)
        for (Index j = 0; j < b.cols(); ++j)
            for (Index t = 0; t < a.rows(); ++t) out(i, j) += a(t, i) * b(t, j);
    return out;
}

/// Normal-equations solve with an explicit inverse.
inline VectorXd normal_equations(const MatrixXd& x, const VectorXd& y) {
    const MatrixXd xtx = transpose_times(x, x);
    MatrixXd yy(y.size(), 1);
    yy.col(0) = y;
    return xtx.inverse() * transpose_times(x, yy).col(0);
}

/// n^{-1} sum_t x_t x_t' e_t^2 by triple loop.
inline MatrixXd eicker_white(const MatrixXd& x, const VectorXd& e) {
    const Index n = x.rows();
    MatrixXd out = MatrixXd::Zero(x.cols(), x.cols());
    for (Index i = 0; i < x.cols(); ++i)
        for (Index j = 0; j < x.cols(); ++j) {
            double s = 0.0;
            for (Index t = 0; t < n; ++t) s += x(t, i) * x(t, j) * e(t) * e(t);
            out(i, j) = s / static_cast<double>(n);
        }
    return out;
}

/// W(gamma) from explicitly formed x_t(gamma) and explicit inverses.
inline double wald(const MatrixXd& x, const VectorXd& y, double gamma, sbreak::VarianceMode mode) {
    const Index n = x.rows();
    const Index p = x.cols();
    const Index k = static_cast<Index>(std::floor(static_cast<double>(n) * gamma + 1e-9));
    MatrixXd xg = MatrixXd::Zero(n, 2 * p);
    for (Index t = 0; t < n; ++t) {
        for (Index j = 0; j < p; ++j) {
            xg(t, j) = x(t, j);
            // 1-based t > k
            if (t + 1 > k) xg(t, p + j) = x(t, j);
        }
    }
    const VectorXd delta = normal_equations(xg, y);
    VectorXd e(n);
    for (Index t = 0; t < n; ++t) {
        double fit = 0.0;
        for (Index j = 0; j < 2 * p; ++j) fit += xg(t, j) * delta(j);
        e(t) = y(t) - fit;
    }
    const MatrixXd m = transpose_times(xg, xg) / static_cast<double>(n);
    MatrixXd omega;
    if (mode == sbreak::VarianceMode::EickerWhite) {
        omega = eicker_white(xg, e);
    } else {
        double s2 = 0.0;
        for (Index t = 0; t < n; ++t) s2 += e(t) * e(t);
        omega = (s2 / static_cast<double>(n)) * m;
    }
    MatrixXd r = MatrixXd::Zero(p, 2 * p);
    for (Index j = 0; j < p; ++j) r(j, p + j) = 1.0;
    const MatrixXd minv = m.inverse();
    const MatrixXd b = r * minv * omega * minv * r.transpose();
    const VectorXd d2 = delta.tail(p);
    return static_cast<double>(n) * d2.dot(b.inverse() * d2);
}

/// sum_{j=-(n-1)}^{n-1} k(j / bw) n^{-1} sum_t z_t z_{t+|j|} by double loop.
inline double v_hat(const VectorXd& z, sbreak::KernelKind kind, Index bw) {
    const Index n = z.size();
    double total = 0.0;
    for (Index j = -(n - 1); j <= n - 1; ++j) {
        const Index a = j < 0 ? -j : j;
        double g = 0.0;
        for (Index t = 0; t + a < n; ++t) g += z(t) * z(t + a);
        g /= static_cast<double>(n);
        total += sbreak::kernel_value(kind, static_cast<double>(j) / static_cast<double>(bw)) * g;
    }
    return total;
}

}  // namespace oracle
