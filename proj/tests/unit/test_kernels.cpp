#include <doctest.h>

#include "helpers.hpp"
#include "jsmooth/error.hpp"
#include "jsmooth/kernels.hpp"
#include "jsmooth/knn.hpp"
#include "jsmooth/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace jsmooth;
using doctest::Approx;

namespace {

// Brute-force k nearest neighbors of row i (excluding i), ordered by (distance, index).
std::vector<Index> brute_knn(const Matrix& x, Index i, Index k) {
    std::vector<std::pair<double, Index>> all;
    for (Index j = 0; j < x.rows(); ++j)
        if (j != i) all.emplace_back((x.row(i) - x.row(j)).norm(), j);
    std::sort(all.begin(), all.end());
    std::vector<Index> out;
    for (Index t = 0; t < k; ++t) out.push_back(all[static_cast<std::size_t>(t)].second);
    return out;
}

Dataset line(Index n) {
    Matrix m(n, 1);
    for (Index i = 0; i < n; ++i) m(i, 0) = static_cast<double>(i * i) * 0.1;  // distinct gaps, no ties
    return Dataset(m);
}

}  // namespace

TEST_SUITE("knn") {

TEST_CASE("kd-tree agrees with brute force") {
    for (Index dim : {1, 2, 3, 7}) {
        const Matrix x = testing::uniform_points(400, dim, 100 + static_cast<std::uint64_t>(dim));
        const KdTree tree(x, 8);
        const Matrix xt = x.transpose();
        for (Index i = 0; i < x.rows(); i += 13) {
            const auto got = tree.query(xt.col(i).data(), 10, i);
            const auto want = brute_knn(x, i, 10);
            REQUIRE(got.size() == want.size());
            for (std::size_t t = 0; t < want.size(); ++t) CHECK(got[t].index == want[t]);
        }
    }
}

TEST_CASE("kd-tree ties broken by index") {
    Matrix x(5, 1);
    x << 0, 1, -1, 1, -1;
    const KdTree tree(x, 1);
    const double q = 0.0;
    const auto got = tree.query(&q, 3, 0);
    CHECK(got[0].index == 1);
    CHECK(got[1].index == 2);
    CHECK(got[2].index == 3);
}

TEST_CASE("kd-tree handles duplicates and bad k") {
    const Matrix x = Matrix::Ones(20, 2);
    const KdTree tree(x);
    const double q[2] = {1.0, 1.0};
    const auto got = tree.query(q, 19, 0);
    CHECK(got.size() == 19);
    for (const auto& nb : got) CHECK(nb.distance == 0.0);
    CHECK_THROWS_AS(tree.query(q, 20, 0), UsageError);
}

}  // TEST_SUITE

TEST_SUITE("kernels") {

TEST_CASE("median bandwidth examples") {
    Matrix two(2, 1);
    two << 0, 2;
    CHECK(median_bandwidth(Dataset(two), 0.3) == Approx(0.6).epsilon(1e-15));
    Matrix three(3, 1);
    three << 0, 1, 2;
    CHECK(median_bandwidth(Dataset(three), 0.3) == Approx(0.3).epsilon(1e-15));
    // Even number of distances: mean of the two middle values. {1,2,3,1,2,1} -> sorted 1,1,1,2,2,3.
    Matrix four(4, 1);
    four << 0, 1, 2, 3;
    CHECK(median_bandwidth(Dataset(four), 1.0) == Approx(1.5));
    CHECK_THROWS_AS(median_bandwidth(Dataset(Matrix::Ones(5, 2)), 0.3), DataError);
    CHECK_THROWS_AS(median_bandwidth(Dataset(two), 0.0), UsageError);
}

TEST_CASE("median bandwidth subsampling is seeded") {
    const Dataset d(testing::uniform_points(300, 2, 4));
    const double a = median_bandwidth(d, 0.3, 100, 1);
    CHECK(a == median_bandwidth(d, 0.3, 100, 1));
    const double exact = median_bandwidth(d, 0.3, 1000, 1);
    CHECK(a == Approx(exact).epsilon(0.1));
}

TEST_CASE("toy spiral bandwidth fixture") {
    // Oracle: brute-force median over all pairs of the seeded spiral.
    const auto toy = synthetic::generate_toy(400, 0);
    const Matrix& x = toy.spiral.values();
    std::vector<double> dist;
    for (Index i = 0; i < x.rows(); ++i)
        for (Index j = i + 1; j < x.rows(); ++j) dist.push_back((x.row(i) - x.row(j)).norm());
    std::sort(dist.begin(), dist.end());
    const std::size_t m = dist.size();
    const double median = m % 2 ? dist[m / 2] : 0.5 * (dist[m / 2 - 1] + dist[m / 2]);
    CHECK(median_bandwidth(toy.spiral, 0.3) == Approx(0.3 * median).epsilon(1e-14));
}

TEST_CASE("gaussian kernel values") {
    Matrix x(3, 1);
    x << 0, 1, 3;
    const KernelMatrix k = gaussian_kernel(Dataset(x), 1.0);
    CHECK(k.coeff(0, 0) == 1.0);
    CHECK(k.coeff(0, 1) == Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(k.coeff(0, 2) == Approx(std::exp(-4.5)).epsilon(1e-15));
    CHECK(k.coeff(1, 2) == Approx(std::exp(-2.0)).epsilon(1e-15));

    Matrix pair(2, 2);
    pair << 0, 0, 0.5 * std::sqrt(2.0), 0.5 * std::sqrt(2.0);  // distance 1 = sigma sqrt 2 with sigma = 1/sqrt 2
    CHECK(gaussian_kernel(Dataset(pair), 1.0 / std::sqrt(2.0)).coeff(0, 1) == Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK_THROWS_AS(gaussian_kernel(Dataset(x), 0.0), UsageError);
}

TEST_CASE("gaussian kernel properties") {
    const Matrix x = testing::uniform_points(200, 3, 21);
    const KernelMatrix k = gaussian_kernel(Dataset(x), 0.3);
    CHECK(k.max_asymmetry() == 0.0);
    CHECK(k.dense().diagonal().isOnes(0.0));
    CHECK(k.dense().minCoeff() >= 0.0);
    CHECK(k.dense().maxCoeff() <= 1.0);

    Vector values;
    Matrix vectors;
    testing::dense_eigen(k.dense(), values, vectors);
    CHECK(values.minCoeff() >= -1e-10 * values(0));

    SUBCASE("rigid motion invariance") {
        const Matrix q = testing::random_orthonormal(3, 3, 8);
        Eigen::RowVector3d shift(1.5, -2.0, 0.25);
        const Matrix moved = (x * q).rowwise() + shift;
        const KernelMatrix k2 = gaussian_kernel(Dataset(moved), 0.3);
        CHECK((k.dense() - k2.dense()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("knn kernel matches brute-force symmetrized graph") {
    for (Index k : {2, 5}) {
        const Dataset d = k == 2 ? line(10) : Dataset(testing::uniform_points(300, 2, 33));
        const KernelMatrix kern = knn_kernel(d, k, 1.0);
        const Index n = d.rows();
        std::set<std::pair<Index, Index>> want;
        for (Index i = 0; i < n; ++i) {
            want.emplace(i, i);
            for (Index j : brute_knn(d.values(), i, k)) {
                want.emplace(i, j);
                want.emplace(j, i);
            }
        }
        std::set<std::pair<Index, Index>> got;
        const SparseMatrix& s = kern.sparse();
        for (Index i = 0; i < s.outerSize(); ++i)
            for (SparseMatrix::InnerIterator it(s, i); it; ++it) got.emplace(it.row(), it.col());
        CHECK(got == want);
        CHECK(kern.max_asymmetry() == 0.0);
        CHECK(kern.nonzeros() <= 2 * k * n + n);
    }
}

TEST_CASE("knn kernel weights") {
    const Dataset d = line(10);
    const KernelMatrix kern = knn_kernel(d, 2, 1.5);
    const Matrix& x = d.values();
    // Radii from brute force.
    Vector r(10);
    for (Index i = 0; i < 10; ++i) r(i) = std::abs(x(i, 0) - x(brute_knn(x, i, 2)[1], 0));
    CHECK((kern.radii() - r).cwiseAbs().maxCoeff() < 1e-15);
    for (Index i = 0; i < 10; ++i) {
        CHECK(kern.coeff(i, i) == 1.0);
        for (Index j = 0; j < 10; ++j) {
            if (i == j) continue;
            const auto ni = brute_knn(x, i, 2), nj = brute_knn(x, j, 2);
            const bool ij = std::find(ni.begin(), ni.end(), j) != ni.end();
            const bool ji = std::find(nj.begin(), nj.end(), i) != nj.end();
            const double w = std::exp(-std::pow(x(i, 0) - x(j, 0), 2) / (2.25 * r(i) * r(j)));
            const double want = 0.5 * (ij ? w : 0.0) + 0.5 * (ji ? w : 0.0);
            CHECK(kern.coeff(i, j) == Approx(want).epsilon(1e-14));
        }
    }
}

TEST_CASE("knn kernel edge cases") {
    SUBCASE("all neighbors, large delta gives a dense symmetric pattern") {
        const Dataset d(testing::uniform_points(8, 2, 2));
        const KernelMatrix k = knn_kernel(d, 7, 100.0);
        CHECK(k.nonzeros() == 64);
        CHECK(k.max_asymmetry() == 0.0);
    }
    SUBCASE("isolated point decays") {
        Matrix x = testing::uniform_points(30, 2, 3) * 0.01;
        x.row(29) << 100.0, 100.0;
        const KernelMatrix k = knn_kernel(Dataset(x), 3, 1.0);
        CHECK(k.coeff(29, 29) > 0.0);
        for (Index j = 0; j < 29; ++j) CHECK(k.coeff(29, j) < 1e-6);
    }
    SUBCASE("duplicates get weight 1") {
        Matrix x = testing::uniform_points(10, 2, 4);
        x.row(5) = x.row(4);
        const KernelMatrix k = knn_kernel(Dataset(x), 3, 1.0);
        CHECK(k.coeff(4, 5) == 1.0);
    }
    SUBCASE("k out of range") {
        const Dataset d(testing::uniform_points(6, 2, 5));
        CHECK_THROWS_AS(knn_kernel(d, 6, 1.0), UsageError);
        CHECK_THROWS_AS(knn_kernel(d, 0, 1.0), UsageError);
    }
}

TEST_CASE("build_kernel resolves the bandwidth") {
    const Dataset d(testing::uniform_points(50, 2, 6));
    KernelParams p;
    const KernelMatrix k = build_kernel(d, p);
    CHECK(k.params().bandwidth == median_bandwidth(d, 0.3));
    CHECK(k.is_dense());
    p.kind = KernelKind::KnnContinuous;
    p.k = 5;
    CHECK_FALSE(build_kernel(d, p).is_dense());
    CHECK(kernel_kind_from_string("knn-continuous") == KernelKind::KnnContinuous);
    CHECK_THROWS_AS(kernel_kind_from_string("laplace"), UsageError);
}

}  // TEST_SUITE
