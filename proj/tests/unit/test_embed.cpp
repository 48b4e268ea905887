#include <doctest.h>

#include "helpers.hpp"
#include "jsmooth/embed.hpp"
#include "jsmooth/error.hpp"
#include "jsmooth/kernels.hpp"
#include "jsmooth/metrics.hpp"

#include <cmath>

using namespace jsmooth;

TEST_SUITE("embed") {

TEST_CASE("uniform circle embeds as a circle") {
    // Equally spaced angles: the Markov matrix is circulant and its leading
    // non-trivial eigenvectors are exactly cos and sin.
    const Matrix x = testing::circle_points(400);
    const DiffusionEmbedding e = diffusion_maps(x, 2);
    CHECK(e.coordinates.cols() == 2);
    CHECK(radius_spread(e.coordinates) < 0.05);
    CHECK(e.eigenvalues(0) >= e.eigenvalues(1));
    CHECK(e.eigenvalues(0) <= 1.0);
    CHECK(e.eigenvalues(1) > 0.0);
}

TEST_CASE("randomly sampled circle embeds as a closed curve around the origin") {
    Rng rng(1);
    Matrix x(600, 2);
    for (Index i = 0; i < 600; ++i) {
        const double t = 2.0 * M_PI * rng.uniform();
        x.row(i) << std::cos(t), std::sin(t);
    }
    const DiffusionEmbedding e = diffusion_maps(x, 2);
    const Vector r = e.coordinates.rowwise().norm();
    CHECK(r.minCoeff() > 0.5 * r.mean());
    CHECK(radius_spread(e.coordinates) < 0.2);
}

TEST_CASE("one-dimensional monotone features") {
    Rng rng(2);
    Vector t(300);
    for (Index i = 0; i < 300; ++i) t(i) = rng.uniform();
    Matrix x(300, 1);
    x.col(0) = t.array().cube() + t.array();
    const DiffusionEmbedding e = diffusion_maps(x, 1);
    CHECK(std::abs(spearman(e.coordinates.col(0), t)) > 0.99);
}

TEST_CASE("markov matrix rows sum to one") {
    const Matrix x = testing::uniform_points(80, 2, 3);
    const Matrix p = markov_matrix(gaussian_kernel(Dataset(x), 0.2).dense());
    CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("embedding is invariant to orthogonal maps of the features") {
    const Matrix x = testing::uniform_points(150, 3, 4);
    const Matrix q = testing::random_orthonormal(3, 3, 5);
    const DiffusionEmbedding a = diffusion_maps(x, 3);
    const DiffusionEmbedding b = diffusion_maps(x * q, 3);
    CHECK((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
    for (Index j = 0; j < 3; ++j) {
        const double cos = a.coordinates.col(j).normalized().dot(b.coordinates.col(j).normalized());
        CHECK(std::abs(cos) > 1.0 - 1e-8);
    }
}

TEST_CASE("degenerate input") {
    CHECK_THROWS_AS(diffusion_maps(Matrix::Constant(20, 2, 1.0), 2), DataError);
    CHECK_THROWS_AS(diffusion_maps(testing::uniform_points(5, 2, 6), 4), UsageError);
    CHECK_THROWS_AS(diffusion_maps(testing::uniform_points(5, 2, 6), 0), UsageError);
}

}  // TEST_SUITE
