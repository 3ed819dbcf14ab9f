#include "sbreak/design.hpp"

#include "sbreak/error.hpp"
#include "sbreak/regression.hpp"

#include <cmath>
#include <sstream>

namespace sbreak {

namespace {

constexpr std::string_view kModule = "design_basis";

// Exponent vectors of total degree exactly `total`, leading variable's
// exponent descending (graded lex within one degree).
void exponents_of_degree(Index k, int total, Index var, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
    if (var == k - 1) {
        current[static_cast<std::size_t>(var)] = total;
        out.push_back(current);
        current[static_cast<std::size_t>(var)] = 0;
        return;
    }
    for (int e = total; e >= 0; --e) {
        current[static_cast<std::size_t>(var)] = e;
        exponents_of_degree(k, total - e, var + 1, current, out);
    }
    current[static_cast<std::size_t>(var)] = 0;
}

std::string monomial_label(const std::vector<int>& exps) {
    std::ostringstream s;
    bool any = false;
    for (std::size_t i = 0; i < exps.size(); ++i) {
        if (exps[i] == 0) continue;
        if (any) s << '*';
        s << 'z' << (i + 1);
        if (exps[i] > 1) s << '^' << exps[i];
        any = true;
    }
    return any ? s.str() : "1";
}

void require_finite(const MatrixXd& m, const char* what) {
    if (!m.allFinite()) {
        throw Error(ErrorCode::NonFiniteInput, kModule, std::string("non-finite entry in ") + what);
    }
}

}  // namespace

void RawSample::validate() const {
    if (y.size() < 1) throw Error(ErrorCode::SampleTooShort, kModule, "empty response");
    if (z.cols() > 0 && z.rows() != y.size()) {
        throw Error(ErrorCode::InvalidConfig, kModule, "covariate rows do not match response length");
    }
    if (!y.allFinite()) throw Error(ErrorCode::NonFiniteInput, kModule, "non-finite entry in y");
    require_finite(z, "Z");
}

DesignSpec DesignSpec::polynomial(int degree) {
    if (degree < 0) throw Error(ErrorCode::InvalidConfig, kModule, "polynomial degree must be >= 0");
    DesignSpec s;
    s.kind = DesignKind::PolynomialSieve;
    s.degree = degree;
    s.include_intercept = true;
    return s;
}

DesignSpec DesignSpec::ar(int order) {
    if (order < 1) throw Error(ErrorCode::InvalidConfig, kModule, "AR order must be >= 1");
    DesignSpec s;
    s.kind = DesignKind::ArLags;
    s.ar_order = order;
    s.include_intercept = true;
    return s;
}

DesignSpec DesignSpec::raw(bool include_intercept) {
    DesignSpec s;
    s.kind = DesignKind::RawColumns;
    s.include_intercept = include_intercept;
    return s;
}

Index DesignSpec::column_count(Index k) const {
    switch (kind) {
        case DesignKind::PolynomialSieve: {
            // C(k + d, d)
            double c = 1.0;
            for (int i = 1; i <= degree; ++i) c = c * static_cast<double>(k + i) / i;
            return static_cast<Index>(std::llround(c));
        }
        case DesignKind::ArLags:
            return ar_order + 1;
        case DesignKind::RawColumns:
            return k + (include_intercept ? 1 : 0);
    }
    return 0;
}

std::string DesignSpec::describe() const {
    std::ostringstream s;
    switch (kind) {
        case DesignKind::PolynomialSieve: s << "poly:" << degree; break;
        case DesignKind::ArLags: s << "ar:" << ar_order; break;
        case DesignKind::RawColumns: s << (include_intercept ? "raw" : "raw-nointercept"); break;
    }
    return s.str();
}

std::vector<std::vector<int>> monomial_exponents(Index k, int degree) {
    std::vector<std::vector<int>> out;
    std::vector<int> current(static_cast<std::size_t>(k), 0);
    out.push_back(current);
    if (k == 0) return out;
    for (int total = 1; total <= degree; ++total) exponents_of_degree(k, total, 0, current, out);
    return out;
}

DesignMatrix build_polynomial_basis(const MatrixXd& z, int degree) {
    if (degree < 0) throw Error(ErrorCode::InvalidConfig, kModule, "polynomial degree must be >= 0");
    require_finite(z, "Z");
    const auto exps = monomial_exponents(z.cols(), degree);
    DesignMatrix out;
    out.x.resize(z.rows(), static_cast<Index>(exps.size()));
    out.labels.reserve(exps.size());
    for (std::size_t j = 0; j < exps.size(); ++j) {
        VectorXd col = VectorXd::Ones(z.rows());
        for (Index v = 0; v < z.cols(); ++v) {
            for (int e = 0; e < exps[j][static_cast<std::size_t>(v)]; ++e) col.array() *= z.col(v).array();
        }
        out.x.col(static_cast<Index>(j)) = col;
        out.labels.push_back(monomial_label(exps[j]));
    }
    require_finite(out.x, "polynomial basis");
    require_full_column_rank(out.x, kModule);
    return out;
}

RegressionData build_ar_design(const VectorXd& y, int order) {
    if (order < 1) throw Error(ErrorCode::InvalidConfig, kModule, "AR order must be >= 1");
    const Index n = y.size();
    const Index q = order;
    // room for the presample plus two feasible regimes of p + ... rows
    if (n <= q + 2 * (q + 1)) {
        std::ostringstream msg;
        msg << "series of length " << n << " too short for AR order " << q;
        throw Error(ErrorCode::SampleTooShort, kModule, msg.str());
    }
    if (!y.allFinite()) throw Error(ErrorCode::NonFiniteInput, kModule, "non-finite entry in y");
    RegressionData out;
    const Index n_eff = n - q;
    out.design.x.resize(n_eff, q + 1);
    out.design.x.col(0).setOnes();
    out.design.labels.push_back("1");
    for (Index lag = 1; lag <= q; ++lag) {
        out.design.x.col(lag) = y.segment(q - lag, n_eff);
        out.design.labels.push_back("y[t-" + std::to_string(lag) + "]");
    }
    out.y = y.tail(n_eff);
    return out;
}

DesignMatrix build_raw_design(const MatrixXd& z, bool include_intercept) {
    require_finite(z, "Z");
    DesignMatrix out;
    const Index offset = include_intercept ? 1 : 0;
    out.x.resize(z.rows(), z.cols() + offset);
    if (include_intercept) {
        out.x.col(0).setOnes();
        out.labels.push_back("1");
    }
    out.x.rightCols(z.cols()) = z;
    for (Index j = 0; j < z.cols(); ++j) out.labels.push_back("z" + std::to_string(j + 1));
    if (out.x.cols() == 0) throw Error(ErrorCode::InvalidConfig, kModule, "design has no columns");
    require_full_column_rank(out.x, kModule);
    return out;
}

RegressionData build_design(const RawSample& sample, const DesignSpec& spec) {
    sample.validate();
    switch (spec.kind) {
        case DesignKind::PolynomialSieve:
            return {build_polynomial_basis(sample.z, spec.degree), sample.y};
        case DesignKind::ArLags:
            return build_ar_design(sample.y, spec.ar_order);
        case DesignKind::RawColumns:
            return {build_raw_design(sample.z, spec.include_intercept), sample.y};
    }
    throw Error(ErrorCode::InvalidConfig, kModule, "unknown design kind");
}

Index split_index_for(Index n_eff, double gamma) {
    return static_cast<Index>(std::floor(static_cast<double>(n_eff) * gamma + 1e-9));
}

bool split_feasible(Index n_eff, Index p, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) return false;
    const Index k = split_index_for(n_eff, gamma);
    return k >= p + 2 && n_eff - k >= p + 2;
}

SplitDesign split_design(const DesignMatrix& design, double gamma) {
    const Index n = design.n_eff();
    const Index p = design.p();
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw Error(ErrorCode::InvalidTrim, kModule, "break fraction must lie in (0,1)");
    }
    if (!split_feasible(n, p, gamma)) {
        std::ostringstream msg;
        msg << "gamma=" << gamma << " leaves fewer than p+2=" << p + 2 << " rows in a regime (n_eff=" << n << ")";
        throw Error(ErrorCode::BreakGridInfeasible, kModule, msg.str());
    }
    SplitDesign out;
    out.gamma = gamma;
    out.split_index = split_index_for(n, gamma);
    out.x_gamma.resize(n, 2 * p);
    out.x_gamma.leftCols(p) = design.x;
    out.x_gamma.rightCols(p).topRows(out.split_index).setZero();
    out.x_gamma.rightCols(p).bottomRows(n - out.split_index) = design.x.bottomRows(n - out.split_index);
    return out;
}

}  // namespace sbreak
