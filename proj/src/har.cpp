#include "sbreak/har.hpp"

#include "sbreak/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace sbreak {

namespace {

constexpr std::string_view kModule = "har";

// Neumaier compensated accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) noexcept {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    [[nodiscard]] double value() const noexcept { return sum + comp; }
};

Index ipow(Index base, int r) noexcept {
    Index out = 1;
    for (int i = 0; i < r; ++i) out *= base;
    return out;
}

}  // namespace

double kernel_value(KernelKind kind, double x) noexcept {
    const double a = std::abs(x);
    switch (kind) {
        case KernelKind::Bartlett:
            return a < 1.0 ? 1.0 - a : 0.0;
        case KernelKind::Parzen:
            if (a <= 0.5) return 1.0 - 6.0 * a * a + 6.0 * a * a * a;
            if (a <= 1.0) return 2.0 * (1.0 - a) * (1.0 - a) * (1.0 - a);
            return 0.0;
        case KernelKind::None:
            return a == 0.0 ? 1.0 : 0.0;
    }
    return 0.0;
}

Index integer_root(Index n, int r) noexcept {
    if (n <= 0) return 0;
    auto root = static_cast<Index>(std::floor(std::pow(static_cast<double>(n), 1.0 / r)));
    while (root > 0 && ipow(root, r) > n) --root;
    while (ipow(root + 1, r) <= n) ++root;
    return root;
}

Index bandwidth(const KernelSpec& spec, Index n_eff) {
    if (spec.kind == KernelKind::None) return 0;
    if (!(spec.a0 > 0.0)) throw Error(ErrorCode::InvalidConfig, kModule, "bandwidth multiplier a0 must be positive");
    const Index root = integer_root(n_eff, spec.kind == KernelKind::Parzen ? 5 : 3);
    return std::max<Index>(1, static_cast<Index>(std::llround(spec.a0 * static_cast<double>(root))));
}

VectorXd zeta_series(const MatrixXd& x, const VectorXd& eps_hat, const MatrixXd& omega_hat, ZetaMode mode) {
    const Index p = x.cols();
    if (x.rows() != eps_hat.size() || omega_hat.rows() != p || omega_hat.cols() != p) {
        throw Error(ErrorCode::InvalidConfig, kModule, "dimension mismatch in zeta_series");
    }
    if (x.rows() == 0) return VectorXd();
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(omega_hat);
    if (eig.info() != Eigen::Success) throw Error(ErrorCode::SingularOmega, kModule, "eigendecomposition failed");
    VectorXd lambda = eig.eigenvalues();
    const double lmax = lambda.maxCoeff();
    if (!(lmax > 0.0) || !std::isfinite(lmax)) {
        throw Error(ErrorCode::SingularOmega, kModule, "Omega has no positive eigenvalue");
    }
    lambda = lambda.cwiseMax(1e-12 * lmax);
    const MatrixXd& v = eig.eigenvectors();
    const MatrixXd inv_root = v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();

    // Row t of xi is (Omega^{-1/2} x_t e_t)'.
    const MatrixXd xi = (x * inv_root).array().colwise() * eps_hat.array();
    const double scale = 1.0 / std::sqrt(static_cast<double>(p));
    if (mode == ZetaMode::LastObs) {
        const VectorXd last = xi.row(xi.rows() - 1).transpose();
        return scale * (xi * last);
    }
    return scale * xi.rowwise().sum();
}

double autocovariance(const VectorXd& zeta, Index lag) {
    const Index n = zeta.size();
    if (lag < 0) lag = -lag;
    if (n == 0 || lag >= n) return 0.0;
    CompensatedSum acc;
    for (Index t = 0; t + lag < n; ++t) acc.add(zeta(t) * zeta(t + lag));
    return acc.value() / static_cast<double>(n);
}

HarEstimate v_hat(const VectorXd& zeta, const KernelSpec& spec) {
    if (!zeta.allFinite()) throw Error(ErrorCode::NonFiniteInput, kModule, "non-finite zeta series");
    HarEstimate out;
    out.kernel = spec;
    out.zeta = zeta;
    if (spec.kind == KernelKind::None) {
        out.v_hat = 1.0;
        out.v_raw = 1.0;
        return out;
    }
    const Index n = zeta.size();
    out.bandwidth = bandwidth(spec, n);
    const double bw = static_cast<double>(out.bandwidth);
    const Index max_lag = std::min<Index>(n - 1, out.bandwidth);
    CompensatedSum acc;
    acc.add(autocovariance(zeta, 0));
    for (Index j = 1; j <= max_lag; ++j) {
        const double w = kernel_value(spec.kind, static_cast<double>(j) / bw);
        if (w == 0.0) continue;
        acc.add(2.0 * w * autocovariance(zeta, j));
    }
    out.v_raw = acc.value();
    out.v_hat = out.v_raw;
    if (!(out.v_hat >= kVHatFloor)) {
        out.v_hat = kVHatFloor;
        out.floored = true;
    }
    return out;
}

HarEstimate estimate_har(const DesignMatrix& x, const VectorXd& y, VarianceMode mode, const KernelSpec& spec,
                         ZetaMode zeta_mode) {
    if (spec.kind == KernelKind::None) {
        HarEstimate out;
        out.kernel = spec;
        out.zeta_mode = zeta_mode;
        return out;
    }
    const OlsFit fit = ols(x.x, y);
    const MomentMatrices mm = moment_matrices(x.x, fit.residuals, mode);
    HarEstimate out = v_hat(zeta_series(x.x, fit.residuals, mm.omega_hat, zeta_mode), spec);
    out.zeta_mode = zeta_mode;
    return out;
}

std::string to_string(KernelKind kind) {
    switch (kind) {
        case KernelKind::Parzen: return "parzen";
        case KernelKind::Bartlett: return "bartlett";
        case KernelKind::None: return "none";
    }
    return "unknown";
}

std::string to_string(ZetaMode mode) { return mode == ZetaMode::LastObs ? "last-obs" : "ones-vector"; }

}  // namespace sbreak
