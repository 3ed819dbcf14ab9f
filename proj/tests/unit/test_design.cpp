#include "oracles.hpp"

#include "sbreak/design.hpp"
#include "sbreak/error.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <set>

using namespace sbreak;
using Catch::Matchers::WithinAbs;

namespace {

Index binomial(Index n, Index k) {
    Index r = 1;
    for (Index i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Every exponent vector with total degree <= d, by enumerating the full box.
std::set<std::vector<int>> brute_monomials(Index k, int d) {
    std::set<std::vector<int>> out;
    std::vector<int> e(static_cast<std::size_t>(k), 0);
    while (true) {
        int total = 0;
        for (int v : e) total += v;
        if (total <= d) out.insert(e);
        std::size_t i = 0;
        while (i < e.size() && ++e[i] > d) e[i++] = 0;
        if (i == e.size()) break;
    }
    return out;
}

}  // namespace

TEST_CASE("polynomial basis column counts", "[design]") {
    const MatrixXd z2 = oracle::random_matrix(40, 2, 3);
    CHECK(build_polynomial_basis(z2, 2).p() == 6);
    CHECK(build_polynomial_basis(z2, 3).p() == 10);
    CHECK(build_polynomial_basis(z2, 4).p() == 15);

    const DesignMatrix d0 = build_polynomial_basis(z2, 0);
    REQUIRE(d0.p() == 1);
    CHECK((d0.x.array() == 1.0).all());

    for (Index k = 1; k <= 4; ++k)
        for (int d = 0; d <= 6; ++d) CHECK(DesignSpec::polynomial(d).column_count(k) == binomial(k + d, d));
}

TEST_CASE("monomials match brute-force enumeration", "[design]") {
    for (Index k = 1; k <= 4; ++k) {
        for (int d = 0; d <= 5; ++d) {
            const auto exps = monomial_exponents(k, d);
            const std::set<std::vector<int>> got(exps.begin(), exps.end());
            CHECK(got.size() == exps.size());
            CHECK(got == brute_monomials(k, d));
            // graded: total degree never decreases, intercept first
            int prev = 0;
            for (const auto& e : exps) {
                int total = 0;
                for (int v : e) total += v;
                CHECK(total >= prev);
                prev = total;
            }
        }
    }
}

TEST_CASE("k=3 quadratic labels", "[design]") {
    const DesignMatrix d = build_polynomial_basis(oracle::random_matrix(50, 3, 5), 2);
    const std::vector<std::string> expected{"1",    "z1",    "z2",    "z3",    "z1^2",
                                            "z1*z2", "z1*z3", "z2^2", "z2*z3", "z3^2"};
    CHECK(d.labels == expected);
}

TEST_CASE("basis values", "[design]") {
    MatrixXd z(8, 2);
    z << 1, 2, 3, 4, -1, 0.5, 0.2, -3, 5, 1, -2, -2, 0.7, 0.1, 4, -1;
    const DesignMatrix d = build_polynomial_basis(z, 2);
    for (Index t = 0; t < 8; ++t) {
        const double a = z(t, 0), b = z(t, 1);
        const double expected[6] = {1, a, b, a * a, a * b, b * b};
        for (Index j = 0; j < 6; ++j) CHECK(d.x(t, j) == expected[j]);
    }
}

TEST_CASE("permuting covariates permutes basis columns", "[design]") {
    const MatrixXd z = oracle::random_matrix(30, 3, 9);
    MatrixXd zp(30, 3);
    zp << z.col(2), z.col(0), z.col(1);
    const DesignMatrix a = build_polynomial_basis(z, 3);
    const DesignMatrix b = build_polynomial_basis(zp, 3);
    REQUIRE(a.p() == b.p());
    for (Index j = 0; j < a.p(); ++j) {
        bool found = false;
        for (Index i = 0; i < b.p() && !found; ++i) found = (a.x.col(j) - b.x.col(i)).norm() <= 1e-12 * a.x.col(j).norm();
        CHECK(found);
    }
}

TEST_CASE("polynomial basis errors", "[design]") {
    MatrixXd z = oracle::random_matrix(20, 2, 1);
    z(4, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK(oracle::code_of([&] { (void)build_polynomial_basis(z, 2); }) == ErrorCode::NonFiniteInput);

    MatrixXd dup(20, 2);
    dup.col(0) = oracle::random_vector(20, 2);
    dup.col(1) = dup.col(0);
    CHECK(oracle::code_of([&] { (void)build_polynomial_basis(dup, 1); }) == ErrorCode::RankDeficient);
}

TEST_CASE("AR lag embedding", "[design]") {
    VectorXd y(8);
    y << 1, 2, 3, 4, 5, 6, 7, 8;
    const RegressionData r = build_ar_design(y, 1);
    REQUIRE(r.design.n_eff() == 7);
    REQUIRE(r.design.p() == 2);
    for (Index t = 0; t < 7; ++t) {
        CHECK(r.design.x(t, 0) == 1.0);
        CHECK(r.design.x(t, 1) == static_cast<double>(t + 1));
        CHECK(r.y(t) == static_cast<double>(t + 2));
    }
    CHECK(r.design.labels == std::vector<std::string>{"1", "y[t-1]"});

    const RegressionData r4 = build_ar_design(oracle::random_vector(300, 4), 4);
    CHECK(r4.design.n_eff() == 296);
    CHECK(r4.design.p() == 5);

    VectorXd y3 = oracle::random_vector(40, 5);
    const RegressionData r3 = build_ar_design(y3, 3);
    for (Index t = 0; t < r3.design.n_eff(); ++t)
        for (Index lag = 1; lag <= 3; ++lag) CHECK(r3.design.x(t, lag) == y3(t + 3 - lag));

    CHECK(oracle::code_of([&] { (void)build_ar_design(y, 8); }) == ErrorCode::SampleTooShort);
    CHECK(oracle::code_of([] {
              VectorXd s(4);
              s << 1, 2, 3, 4;
              (void)build_ar_design(s, 1);
          }) == ErrorCode::SampleTooShort);
}

TEST_CASE("split design blocks", "[design]") {
    DesignMatrix d;
    d.x = oracle::random_matrix(10, 1, 7);
    const SplitDesign s = split_design(d, 0.5);
    CHECK(s.split_index == 5);
    for (Index t = 0; t < 10; ++t) {
        CHECK(s.x_gamma(t, 0) == d.x(t, 0));
        CHECK(s.x_gamma(t, 1) == (t < 5 ? 0.0 : d.x(t, 0)));
    }

    CHECK(split_index_for(200, 0.35) == 70);
    CHECK(split_index_for(300, 0.35) == 105);

    const DesignMatrix d6 = oracle::random_design(100, 6, 3);
    CHECK(oracle::code_of([&] { (void)split_design(d6, 0.999); }) == ErrorCode::BreakGridInfeasible);
    CHECK(oracle::code_of([&] { (void)split_design(d6, 1.0); }) == ErrorCode::InvalidTrim);
    CHECK(oracle::code_of([&] { (void)split_design(d6, 0.0); }) == ErrorCode::InvalidTrim);

    const SplitDesign s6 = split_design(d6, 0.35);
    CHECK(s6.x_gamma.leftCols(6) == d6.x);
    CHECK(s6.x_gamma.rightCols(6).topRows(35).isZero(0.0));
    CHECK(s6.x_gamma.rightCols(6).bottomRows(65) == d6.x.bottomRows(65));
}

TEST_CASE("raw sample validation", "[design]") {
    RawSample s;
    s.y = oracle::random_vector(10, 1);
    s.z = oracle::random_matrix(10, 2, 2);
    s.validate();
    s.y(3) = std::numeric_limits<double>::infinity();
    CHECK(oracle::code_of([&] { s.validate(); }) == ErrorCode::NonFiniteInput);
}
