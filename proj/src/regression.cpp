#include "sbreak/regression.hpp"

#include "sbreak/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace sbreak {

namespace {

constexpr std::string_view kModule = "regression";

bool all_finite(const MatrixXd& m) { return m.allFinite(); }

// scale * a'a, exactly symmetric.
MatrixXd scaled_gram(const MatrixXd& a, double scale) {
    MatrixXd lower = MatrixXd::Zero(a.cols(), a.cols());
    lower.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose(), scale);
    MatrixXd full = lower.selfadjointView<Eigen::Lower>();
    return full;
}

}  // namespace

double rank_tolerance(Index rows, Index cols, double sigma_max) noexcept {
    return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * sigma_max;
}

VectorXd singular_values(const MatrixXd& x) {
    if (x.cols() == 0) return VectorXd();
    if (x.rows() < x.cols()) {
        return Eigen::JacobiSVD<MatrixXd>(x).singularValues();
    }
    Eigen::HouseholderQR<MatrixXd> qr(x);
    const Index c = x.cols();
    MatrixXd r = qr.matrixQR().topLeftCorner(c, c).triangularView<Eigen::Upper>();
    return Eigen::JacobiSVD<MatrixXd>(r).singularValues();
}

void require_full_column_rank(const MatrixXd& x, std::string_view module) {
    if (x.rows() < x.cols()) {
        std::ostringstream msg;
        msg << "design has " << x.rows() << " rows but " << x.cols() << " columns";
        throw Error(ErrorCode::RankDeficient, module, msg.str());
    }
    const VectorXd sv = singular_values(x);
    if (sv.size() == 0) return;
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    if (!(smin > rank_tolerance(x.rows(), x.cols(), smax))) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "smallest singular value " << smin << " (largest " << smax << ")";
        throw Error(ErrorCode::RankDeficient, module, msg.str());
    }
}

OlsFit ols(const MatrixXd& x, const VectorXd& y) {
    if (x.rows() != y.size()) {
        throw Error(ErrorCode::InvalidConfig, kModule, "row count of X does not match length of y");
    }
    if (!all_finite(x) || !y.allFinite()) {
        throw Error(ErrorCode::NonFiniteInput, kModule, "non-finite entry in X or y");
    }
    if (x.rows() < x.cols()) {
        throw Error(ErrorCode::RankDeficient, kModule, "fewer rows than columns");
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(x);
    const Index c = x.cols();
    const MatrixXd r = qr.matrixR().topLeftCorner(c, c).triangularView<Eigen::Upper>();
    const VectorXd sv = Eigen::JacobiSVD<MatrixXd>(r).singularValues();
    if (c > 0) {
        const double smin = sv(c - 1);
        if (!(smin > rank_tolerance(x.rows(), c, sv(0)))) {
            std::ostringstream msg;
            msg.precision(6);
            msg << "smallest singular value " << smin << " (largest " << sv(0) << ")";
            throw Error(ErrorCode::RankDeficient, kModule, msg.str());
        }
    }
    OlsFit fit;
    fit.coef = qr.solve(y);
    fit.residuals = y - x * fit.coef;
    fit.rss = fit.residuals.squaredNorm();
    return fit;
}

MomentMatrices moment_matrices(const MatrixXd& x, const VectorXd& residuals, VarianceMode mode) {
    if (x.rows() != residuals.size()) {
        throw Error(ErrorCode::InvalidConfig, kModule, "residual length does not match design rows");
    }
    const double n = static_cast<double>(x.rows());
    MomentMatrices out;
    out.mode = mode;
    out.m_hat = scaled_gram(x, 1.0 / n);
    if (mode == VarianceMode::EickerWhite) {
        const MatrixXd weighted = x.array().colwise() * residuals.array();
        out.omega_hat = scaled_gram(weighted, 1.0 / n);
    } else {
        const double s2 = residuals.squaredNorm() / n;
        out.sigma2_hat = s2;
        out.omega_hat = s2 * out.m_hat;
    }
    if (!out.omega_hat.allFinite()) {
        throw Error(ErrorCode::NonFiniteInput, kModule, "non-finite variance matrix");
    }
    return out;
}

}  // namespace sbreak
