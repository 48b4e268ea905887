#include <doctest.h>

#include "helpers.hpp"
#include "jsmooth/error.hpp"
#include "jsmooth/preprocess.hpp"

#include <cmath>

using namespace jsmooth;
using doctest::Approx;

TEST_SUITE("preprocess") {

TEST_CASE("pca matches a covariance eigendecomposition") {
    Matrix x(5, 3);
    x << 2.0, 0.5, 1.0,   //
        -1.0, 1.5, 0.0,   //
        0.5, -2.0, 1.5,   //
        3.0, 1.0, -1.0,   //
        -0.5, 0.0, 2.5;
    const PcaMap map = pca_fit(x, 2);
    // Oracle: eigenvectors of the sample covariance.
    const Matrix centered = x.rowwise() - x.colwise().mean();
    const Matrix cov = centered.transpose() * centered;
    Vector values;
    Matrix vectors;
    testing::dense_eigen(cov, values, vectors);
    for (Index j = 0; j < 2; ++j) {
        CHECK(map.explained(j) * map.explained(j) == Approx(values(j)).epsilon(1e-10));
        CHECK(std::abs(map.components.col(j).dot(vectors.col(j))) == Approx(1.0).epsilon(1e-10));
    }
    CHECK((map.components.transpose() * map.components - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(map.explained(0) >= map.explained(1));

    const Matrix scores = pca_apply(map, x);
    const Matrix oracle_scores = centered * map.components;
    CHECK((scores - oracle_scores).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("full-rank centered data: orthogonal change of basis") {
    Matrix x = testing::gaussian_matrix(20, 3, 5);
    x = x.rowwise() - x.colwise().mean();
    const PcaMap map = pca_fit(x, 3);
    const Matrix back = pca_reconstruct(map, pca_apply(map, x));
    CHECK((back - x).cwiseAbs().maxCoeff() < 1e-12);
    // Distances preserved when q = rank.
    const Matrix y = pca_apply(map, x);
    double worst = 0.0;
    for (Index i = 0; i < 20; ++i)
        for (Index j = 0; j < 20; ++j)
            worst = std::max(worst, std::abs((x.row(i) - x.row(j)).norm() - (y.row(i) - y.row(j)).norm()));
    CHECK(worst < 1e-8);
}

TEST_CASE("rank-one data") {
    const Vector dir = (Vector(4) << 1, -2, 0.5, 3).finished();
    Matrix x(10, 4);
    for (Index i = 0; i < 10; ++i) x.row(i) = static_cast<double>(i) * 0.3 * dir.transpose();
    const PcaMap map = pca_fit(x, 3);
    CHECK(map.explained(0) > 1.0);
    CHECK(map.explained(1) < 1e-12 * map.explained(0));
    CHECK(map.explained(2) < 1e-12 * map.explained(0));
}

TEST_CASE("reconstruction error equals the discarded variance") {
    const Matrix x = testing::gaussian_matrix(30, 6, 6);
    const PcaMap full = pca_fit(x, 6);
    const PcaMap map = pca_fit(x, 4);
    const Matrix back = pca_reconstruct(map, pca_apply(map, x));
    const double err = (back - x).squaredNorm();
    const double discarded = full.explained.tail(2).squaredNorm();
    CHECK(err == Approx(discarded).epsilon(1e-10));
}

TEST_CASE("zero input with zero mean maps to zero") {
    Matrix x(4, 2);
    x << 1, 0, -1, 0, 0, 2, 0, -2;
    const PcaMap map = pca_fit(x, 2);
    CHECK(map.mean.isZero(0.0));
    CHECK(pca_apply(map, Matrix::Zero(1, 2)).isZero(0.0));
}

TEST_CASE("pca validation") {
    const Matrix x = testing::gaussian_matrix(5, 3, 7);
    CHECK_THROWS_AS(pca_fit(x, 0), UsageError);
    CHECK_THROWS_AS(pca_fit(x, 4), UsageError);
    const PcaMap map = pca_fit(x, 2);
    CHECK_THROWS_AS(pca_apply(map, Matrix::Zero(2, 4)), DataError);
}

TEST_CASE("delay embedding") {
    Matrix x(3, 2);
    x << 1, 2, 3, 4, 5, 6;
    const Matrix e = delay_embed(x, 1);
    CHECK(e == (Matrix(2, 4) << 1, 2, 3, 4, 3, 4, 5, 6).finished());

    const Matrix c = Matrix::Constant(10, 3, 2.5);
    const Matrix ce = delay_embed(c, 4);
    CHECK(ce.rows() == 6);
    for (Index i = 1; i < ce.rows(); ++i) CHECK(ce.row(i) == ce.row(0));

    const Matrix big = testing::gaussian_matrix(200, 10, 8);
    const Matrix be = delay_embed(big, 150);
    CHECK(be.rows() == 50);
    CHECK(be.cols() == 1510);
    for (Index i = 0; i < be.rows(); i += 7)
        for (Index lag = 0; lag <= 150; lag += 30) CHECK(be.row(i).segment(lag * 10, 10) == big.row(i + lag));

    CHECK_THROWS_AS(delay_embed(x, 0), UsageError);
    CHECK_THROWS_AS(delay_embed(x, 3), UsageError);
}

}  // TEST_SUITE
