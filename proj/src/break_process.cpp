#include "sbreak/break_process.hpp"

#include "sbreak/error.hpp"
#include "sbreak/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace sbreak {

namespace {

constexpr std::string_view kModule = "break_process";

std::string gamma_text(double gamma) {
    std::ostringstream s;
    s.precision(6);
    s << "gamma=" << gamma;
    return s.str();
}

}  // namespace

BreakGrid make_grid(double gamma_star, double step) {
    if (!(gamma_star > 0.0 && gamma_star < 0.5)) {
        throw Error(ErrorCode::InvalidTrim, kModule, "trimming must lie in (0, 0.5)");
    }
    if (!(step > 0.0 && step <= gamma_star)) {
        throw Error(ErrorCode::InvalidTrim, kModule, "grid step must lie in (0, gamma_star]");
    }
    BreakGrid grid;
    grid.gamma_star = gamma_star;
    grid.step = step;
    const double upper = 1.0 - gamma_star;
    const auto count = static_cast<std::size_t>(std::floor((upper - gamma_star) / step + 1e-9)) + 1;
    grid.points.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        grid.points.push_back(gamma_star + static_cast<double>(j) * step);
    }
    return grid;
}

WaldResult wald_at(const SplitDesign& split, const VectorXd& y, VarianceMode mode) {
    const Index p = split.p();
    const double n = static_cast<double>(split.x_gamma.rows());
    const OlsFit fit = ols(split.x_gamma, y);
    // An exact fit leaves only rounding noise in the residuals.
    if (fit.rss <= 1e-24 * y.squaredNorm()) {
        throw Error(ErrorCode::SingularVariance, kModule, "residuals vanish at " + gamma_text(split.gamma));
    }
    const MomentMatrices mm = moment_matrices(split, fit, mode);

    Eigen::LLT<MatrixXd> m_llt(mm.m_hat);
    if (m_llt.info() != Eigen::Success) {
        throw Error(ErrorCode::SingularVariance, kModule, "M(gamma) not positive definite at " + gamma_text(split.gamma));
    }
    // M^{-1} R' is the last p columns of M^{-1}.
    MatrixXd rt = MatrixXd::Zero(2 * p, p);
    rt.bottomRows(p).setIdentity();
    const MatrixXd minv_rt = m_llt.solve(rt);
    MatrixXd b = minv_rt.transpose() * mm.omega_hat * minv_rt;
    b = 0.5 * (b + b.transpose());

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(b, Eigen::EigenvaluesOnly);
    const double lmax = eig.eigenvalues().maxCoeff();
    const double lmin = eig.eigenvalues().minCoeff();
    if (!(lmax > 0.0) || !(lmin > 1e-10 * lmax)) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "B(gamma) not positive definite at " << gamma_text(split.gamma) << " (eigenvalues " << lmin << ", "
            << lmax << ")";
        throw Error(ErrorCode::SingularVariance, kModule, msg.str());
    }
    Eigen::LDLT<MatrixXd> b_ldlt(b);

    WaldResult out;
    out.delta2 = fit.coef.tail(p);
    out.wald = std::max(0.0, n * out.delta2.dot(b_ldlt.solve(out.delta2)));
    out.ssr = fit.rss;
    return out;
}

BreakProcess compute_break_process(const DesignMatrix& x, const VectorXd& y, const BreakGrid& grid,
                                   VarianceMode mode, unsigned threads) {
    if (grid.points.empty()) throw Error(ErrorCode::InvalidTrim, kModule, "empty break grid");
    if (y.size() != x.n_eff()) {
        throw Error(ErrorCode::InvalidConfig, kModule, "response length does not match design rows");
    }
    for (double g : grid.points) {
        if (!split_feasible(x.n_eff(), x.p(), g)) {
            std::ostringstream msg;
            msg << gamma_text(g) << " leaves fewer than p+2=" << x.p() + 2 << " rows in a regime (n_eff=" << x.n_eff()
                << ")";
            throw Error(ErrorCode::BreakGridInfeasible, kModule, msg.str());
        }
    }
    const std::size_t m = grid.points.size();
    BreakProcess bp;
    bp.grid = grid;
    bp.p = x.p();
    bp.n_eff = x.n_eff();
    bp.mode = mode;
    bp.wald.resize(m);
    bp.q.resize(m);
    bp.delta2.resize(m);
    bp.ssr.resize(m);
    parallel_for(m, threads, [&](std::size_t i) {
        const SplitDesign split = split_design(x, grid.points[i]);
        WaldResult r = wald_at(split, y, mode);
        bp.wald[i] = r.wald;
        bp.q[i] = recentre(r.wald, bp.p);
        bp.delta2[i] = std::move(r.delta2);
        bp.ssr[i] = r.ssr;
    });
    std::size_t best = 0;
    for (std::size_t i = 1; i < m; ++i) {
        if (bp.ssr[i] < bp.ssr[best]) best = i;
    }
    bp.gamma_ssr = grid.points[best];
    return bp;
}

}  // namespace sbreak
