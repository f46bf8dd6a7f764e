#include <doctest.h>

#include <random>

#include "causalattn/attnmat.hpp"

using namespace causalattn;

namespace {

Eigen::MatrixXd chain3_attention() {
    Eigen::MatrixXd a(3, 3);
    a << 1.0, 0.0, 0.0,
         0.5, 0.5, 0.0,
         0.25, 0.25, 0.5;
    return a;
}

}  // namespace

TEST_CASE("validate accepts a proper lower-triangular row-stochastic matrix") {
    const auto a = AttentionMatrix::validate(chain3_attention());
    CHECK(a.size() == 3);
    CHECK(a(2, 0) == doctest::Approx(0.25));
}

TEST_CASE("validate rejects an upper-triangle entry and names it") {
    auto m = chain3_attention();
    m(0, 2) = 0.1;
    try {
        AttentionMatrix::validate(m);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.kind == ValidationError::Kind::NotLowerTriangular);
        CHECK(e.row == 0);
        CHECK(e.col == 2);
    }
}

TEST_CASE("validate rejects negative entries") {
    auto m = chain3_attention();
    m(2, 0) = -0.25;
    m(2, 1) = 0.75;
    CHECK_THROWS_AS(AttentionMatrix::validate(m), ValidationError);
}

TEST_CASE("validate rejects a zero diagonal entry") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.0,
         1.0, 0.0;
    try {
        AttentionMatrix::validate(m);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.kind == ValidationError::Kind::ZeroDiagonal);
        CHECK(e.row == 1);
    }
}

TEST_CASE("validate rejects a row summing away from one") {
    auto m = chain3_attention();
    m(1, 0) = 0.6;
    try {
        AttentionMatrix::validate(m);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.kind == ValidationError::Kind::RowSumOff);
        CHECK(e.row == 1);
    }
}

TEST_CASE("validate tolerates float32-sized row-sum error") {
    auto m = chain3_attention();
    m(1, 0) += 5e-10;
    CHECK_NOTHROW(AttentionMatrix::validate(m));
}

TEST_CASE("to_uni_triangular divides rows by the diagonal") {
    const auto a = AttentionMatrix::validate(chain3_attention());
    const auto m = to_uni_triangular(a);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(1, 1) == 1.0);
    CHECK(m(2, 2) == 1.0);
    CHECK(m(1, 0) == doctest::Approx(1.0));
    CHECK(m(2, 0) == doctest::Approx(0.5));
    CHECK(m(2, 1) == doctest::Approx(0.5));
}

TEST_CASE("covariance of the normalized chain attention") {
    const auto m = to_uni_triangular(AttentionMatrix::validate(chain3_attention()));
    const auto c = covariance(m);
    CHECK(c(0, 0) == doctest::Approx(1.0));
    CHECK(c(1, 1) == doctest::Approx(2.0));
    CHECK(c(1, 0) == doctest::Approx(1.0));
    CHECK(c(2, 2) == doctest::Approx(1.5));
    CHECK(c(2, 0) == doctest::Approx(0.5));
    CHECK(c(2, 1) == doctest::Approx(1.0));
}

TEST_CASE("correlation of the chain fixture matches the closed form") {
    // For the unit-weight 3-chain: r01 = 1/sqrt(2), r12 = 2/sqrt(6),
    // r02 = 1/sqrt(3).
    Eigen::MatrixXd m(3, 3);
    m << 1, 0, 0,
         1, 1, 0,
         1, 1, 1;
    const auto r = correlation(covariance(EffectMatrix::from_matrix(m)));
    CHECK(r(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(r(2, 1) == doctest::Approx(2.0 / std::sqrt(6.0)).epsilon(1e-12));
    CHECK(r(2, 0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
    for (int i = 0; i < 3; ++i) CHECK(r(i, i) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("correlation throws on zero variance") {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
    c(0, 0) = 1.0;
    CHECK_THROWS_AS(correlation(CovarianceMatrix::from_matrix(c)), ZeroVarianceError);
}

TEST_CASE("synthesize_attention inverts to_uni_triangular") {
    const auto a = AttentionMatrix::validate(chain3_attention());
    const auto back = synthesize_attention(to_uni_triangular(a));
    CHECK((back.entries() - a.entries()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("synthesize_attention rejects negative effects") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.0,
         -0.5, 1.0;
    CHECK_THROWS_AS(synthesize_attention(EffectMatrix::from_matrix(m)), ValidationError);
}

TEST_CASE("round trip attention -> effect -> attention over random matrices") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.01, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);
        Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            for (int j = 0; j <= i; ++j) {
                raw(i, j) = unit(rng);
                sum += raw(i, j);
            }
            raw.row(i) /= sum;
        }
        const auto a = AttentionMatrix::validate(raw);
        const auto back = synthesize_attention(to_uni_triangular(a));
        CHECK((back.entries() - a.entries()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("covariance is symmetric positive semidefinite for random effects") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 5);
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
        for (int i = 1; i < n; ++i)
            for (int j = 0; j < i; ++j) m(i, j) = coef(rng);
        const auto c = covariance(EffectMatrix::from_matrix(m));
        CHECK((c.entries() - c.entries().transpose()).cwiseAbs().maxCoeff() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.entries());
        CHECK(es.eigenvalues().minCoeff() > -1e-9);
        for (int i = 0; i < n; ++i) CHECK(c(i, i) >= 1.0 - 1e-12);
    }
}
