#include <doctest.h>

#include "helpers.hpp"
#include "jsmooth/error.hpp"
#include "jsmooth/jsf.hpp"
#include "jsmooth/kernels.hpp"
#include "jsmooth/linalg.hpp"
#include "jsmooth/metrics.hpp"
#include "jsmooth/synthetic.hpp"

#include <cmath>

using namespace jsmooth;
using doctest::Approx;

namespace {

SpectralBasis basis_from(const Matrix& w) { return SpectralBasis{w, Vector::Ones(w.cols()), {}}; }

// Groups of indices whose neighbouring values differ by at most `gap`.
std::vector<std::pair<Index, Index>> clusters(const Vector& s, double gap) {
    std::vector<std::pair<Index, Index>> out;
    Index start = 0;
    for (Index i = 1; i <= s.size(); ++i)
        if (i == s.size() || std::abs(s(i - 1) - s(i)) > gap) {
            out.emplace_back(start, i);
            start = i;
        }
    return out;
}

// Oracle: generic Jacobi SVD of [A B].
struct Oracle {
    Vector values;
    Matrix u;
};

Oracle generic_svd(const Matrix& a, const Matrix& b) {
    Matrix w(a.rows(), a.cols() + b.cols());
    w << a, b;
    Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeThinU);
    return {svd.singularValues(), svd.matrixU()};
}

Matrix concat(const Matrix& a, const Matrix& b) {
    Matrix w(a.rows(), a.cols() + b.cols());
    w << a, b;
    return w;
}

}  // namespace

TEST_SUITE("jsf") {

TEST_CASE("constructive SVD satisfies the two-view identities") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix a = testing::random_orthonormal(300, 12, 2 * seed + 1);
        const Matrix b = testing::random_orthonormal(300, 12, 2 * seed + 2);
        const ConstructiveSvd svd = constructive_svd(a, b);
        REQUIRE(svd.sigma.size() == 24);
        for (Index i = 0; i < 24; ++i) {
            const double half = svd.sigma(i) * svd.sigma(i) / 2.0;
            CHECK(std::abs((a.transpose() * svd.u.col(i)).squaredNorm() - half) < 1e-10);
            CHECK(std::abs((b.transpose() * svd.u.col(i)).squaredNorm() - half) < 1e-10);
        }
        const Matrix recon = svd.u * svd.sigma.asDiagonal() * svd.v.transpose();
        CHECK((concat(a, b) - recon).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((svd.u.transpose() * svd.u - Matrix::Identity(24, 24)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((svd.v.transpose() * svd.v - Matrix::Identity(24, 24)).cwiseAbs().maxCoeff() < 1e-10);
        for (Index i = 1; i < 24; ++i) CHECK(svd.sigma(i) <= svd.sigma(i - 1));
    }
}

TEST_CASE("constructive SVD agrees with a generic SVD of the concatenation") {
    const Matrix a = testing::random_orthonormal(300, 12, 41);
    const Matrix b = testing::random_orthonormal(300, 12, 42);
    const ConstructiveSvd svd = constructive_svd(a, b);
    const Oracle oracle = generic_svd(a, b);
    CHECK((svd.sigma - oracle.values).cwiseAbs().maxCoeff() < 1e-10);
    for (const auto& [lo, hi] : clusters(oracle.values, 1e-8)) {
        const double angle =
            testing::subspace_angle(svd.u.middleCols(lo, hi - lo), oracle.u.middleCols(lo, hi - lo));
        CHECK(angle < 1e-8);
    }
}

TEST_CASE("gammas are the principal cosines") {
    const Matrix a = testing::random_orthonormal(80, 10, 51);
    // b shares part of a's span so the cosines spread over [0, 1].
    Matrix mix = testing::gaussian_matrix(80, 10, 52);
    mix.leftCols(4) += 3.0 * a.leftCols(4);
    Eigen::HouseholderQR<Matrix> qr(mix);
    const Matrix b = qr.householderQ() * Matrix::Identity(80, 10);
    const ConstructiveSvd svd = constructive_svd(a, b);
    // Oracle: principal angles via the QR/SVD method of Bjorck and Golub on
    // the projection of b onto span(a).
    const Matrix proj = a * (a.transpose() * b);
    Eigen::JacobiSVD<Matrix> s(proj);
    CHECK((svd.gamma - s.singularValues()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((principal_cosines(a, b) - s.singularValues()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("identical subspaces") {
    const Matrix a = testing::random_orthonormal(100, 8, 61);
    const JsfModel m = jsf_two_view(basis_from(a), basis_from(a));
    REQUIRE(m.max_functions() == 8);  // the I - Gamma block is null and dropped
    for (Index i = 0; i < 8; ++i) {
        CHECK(m.singular_values(i) * m.singular_values(i) == Approx(2.0).epsilon(1e-12));
        CHECK(m.scores[0](i) == Approx(1.0).epsilon(1e-12));
        CHECK(m.scores[1](i) == Approx(1.0).epsilon(1e-12));
    }
    JsfModel copy = m;
    CHECK(select_m(copy, 0.99) == 8);
}

TEST_CASE("orthogonal subspaces") {
    const Matrix q = testing::random_orthonormal(100, 12, 62);
    JsfModel m = jsf_two_view(basis_from(q.leftCols(6)), basis_from(q.rightCols(6)));
    REQUIRE(m.max_functions() == 12);
    for (Index i = 0; i < 12; ++i) {
        CHECK(m.singular_values(i) * m.singular_values(i) == Approx(1.0).epsilon(1e-12));
        CHECK(m.scores[0](i) == Approx(0.5).epsilon(1e-12));
        CHECK(m.scores[1](i) == Approx(0.5).epsilon(1e-12));
    }
    CHECK(select_m(m, 0.6) == 0);
}

TEST_CASE("model invariants on random bases") {
    const Matrix a = testing::random_orthonormal(200, 15, 63);
    const Matrix b = testing::random_orthonormal(200, 15, 64);
    const JsfModel m = jsf_two_view(basis_from(a), basis_from(b));
    const Index r = m.max_functions();
    CHECK((m.functions.transpose() * m.functions - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() <= 1e-8);
    for (Index i = 0; i < r; ++i) {
        const double s2 = m.singular_values(i) * m.singular_values(i);
        CHECK(s2 >= 0.0);
        CHECK(s2 <= 2.0 + 1e-12);
        CHECK(std::abs(m.scores[0](i) - s2 / 2) < 1e-8);
        CHECK(std::abs(m.scores[1](i) - s2 / 2) < 1e-8);
        if (i < 15) {
            CHECK(m.scores[0](i) >= 0.5 - 1e-12);
            CHECK(m.scores[0](i) <= 1.0 + 1e-12);
        }
    }
    CHECK((m.coefficients[0] - a.transpose() * m.functions).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("view swap symmetry") {
    const Matrix a = testing::random_orthonormal(150, 10, 65);
    const Matrix b = testing::random_orthonormal(150, 10, 66);
    const JsfModel xy = jsf_two_view(basis_from(a), basis_from(b));
    const JsfModel yx = jsf_two_view(basis_from(b), basis_from(a));
    CHECK((xy.singular_values - yx.singular_values).cwiseAbs().maxCoeff() < 1e-12);
    for (const auto& [lo, hi] : clusters(xy.singular_values, 1e-8)) {
        if (hi - lo != 1) continue;
        CHECK(std::abs(xy.functions.col(lo).dot(yx.functions.col(lo))) == Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("row permutation equivariance") {
    const Matrix a = testing::random_orthonormal(120, 8, 67);
    const Matrix b = testing::random_orthonormal(120, 8, 68);
    Rng rng(3);
    const auto perm = rng.permutation(120);
    Matrix pa(120, 8), pb(120, 8);
    for (Index i = 0; i < 120; ++i) {
        pa.row(i) = a.row(perm[static_cast<std::size_t>(i)]);
        pb.row(i) = b.row(perm[static_cast<std::size_t>(i)]);
    }
    const JsfModel m = jsf_two_view(basis_from(a), basis_from(b));
    const JsfModel p = jsf_two_view(basis_from(pa), basis_from(pb));
    for (const auto& [lo, hi] : clusters(m.singular_values, 1e-6)) {
        if (hi - lo != 1) continue;
        Vector moved(120);
        for (Index i = 0; i < 120; ++i) moved(i) = m.functions(perm[static_cast<std::size_t>(i)], lo);
        CHECK(std::abs(moved.dot(p.functions.col(lo))) == Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("two-view input validation") {
    const Matrix a = testing::random_orthonormal(50, 5, 69);
    const Matrix b = testing::random_orthonormal(40, 5, 70);
    CHECK_THROWS_AS(jsf_two_view(basis_from(a), basis_from(b)), DataError);
    const Matrix c = testing::random_orthonormal(50, 3, 71);
    const JsfModel m = jsf_two_view(basis_from(a), basis_from(c));
    CHECK(m.basis_dimension == 3);
    CHECK(default_max_functions(2, 1000) == 512);
    CHECK(default_max_functions(2, 100) == 200);
}

TEST_CASE("gaussian bases share the near-constant direction") {
    const auto toy = synthetic::generate_toy(400, 5);
    const SpectralBasis bx = top_eigenbasis(build_kernel(toy.spiral, {}), 40);
    const SpectralBasis by = top_eigenbasis(build_kernel(toy.torus, {}), 40);
    const JsfModel m = jsf_two_view(bx, by);
    CHECK(m.singular_values(0) * m.singular_values(0) == Approx(2.0).epsilon(1e-3));
    CHECK(m.scores[0](0) >= 0.999);
    CHECK(m.scores[1](0) >= 0.999);
}

TEST_CASE("multi-view with identical bases") {
    const Matrix a = testing::random_orthonormal(90, 6, 72);
    const JsfModel m = jsf_multi_view({basis_from(a), basis_from(a), basis_from(a)});
    REQUIRE(m.max_functions() >= 6);
    for (Index i = 0; i < 6; ++i) CHECK(m.singular_values(i) == Approx(std::sqrt(3.0)).epsilon(1e-10));
    // The Gram route resolves vectors to about sqrt(eps).
    CHECK(testing::subspace_angle(m.functions.leftCols(6), a) < 1e-6);
    CHECK(m.views() == 3);
}

TEST_CASE("multi-view matches a generic SVD") {
    const Matrix a = testing::random_orthonormal(120, 7, 73);
    const Matrix b = testing::random_orthonormal(120, 7, 74);
    const Matrix c = testing::random_orthonormal(120, 7, 75);
    Matrix w(120, 21);
    w << a, b, c;
    Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeThinU);
    for (EigenMethod method : {EigenMethod::Dense, EigenMethod::Lanczos}) {
        EigenOptions opts;
        opts.method = method;
        const JsfModel m = jsf_multi_view({basis_from(a), basis_from(b), basis_from(c)}, 10, opts);
        REQUIRE(m.max_functions() == 10);
        CHECK((m.singular_values - svd.singularValues().head(10)).cwiseAbs().maxCoeff() < 1e-10);
        for (Index i = 0; i < 10; ++i) {
            CHECK(std::abs(std::abs(m.functions.col(i).dot(svd.matrixU().col(i))) - 1.0) < 1e-8);
            CHECK(m.scores[2](i) == Approx((c.transpose() * m.functions.col(i)).squaredNorm()).epsilon(1e-12));
        }
    }
}

TEST_CASE("multi-view with two views delegates") {
    const Matrix a = testing::random_orthonormal(100, 6, 76);
    const Matrix b = testing::random_orthonormal(100, 6, 77);
    const JsfModel two = jsf_two_view(basis_from(a), basis_from(b));
    const JsfModel multi = jsf_multi_view({basis_from(a), basis_from(b)});
    CHECK(two.functions == multi.functions);
    CHECK(two.singular_values == multi.singular_values);
    CHECK_THROWS_AS(jsf_multi_view({basis_from(a)}), UsageError);
}

TEST_CASE("analytic threshold") {
    // Independent evaluation of the closed form in extended precision.
    const long double n4 = 4000.0L, d1 = 1000.0L;
    const long double want = 0.5L + std::sqrt(d1 - 0.5L) * std::sqrt(n4 - d1 - 0.5L) / (n4 - 1.0L);
    CHECK(std::abs(analytic_threshold(4000, 1000) - static_cast<double>(want)) < 1e-15);
    CHECK(std::abs(analytic_threshold(4000, 1000) - 0.932983) < 1e-4);
    CHECK(analytic_threshold(3, 1) == Approx(0.5 + std::sqrt(3.0) / 4.0).epsilon(1e-15));
    const Index n = 100000;
    CHECK(analytic_threshold(n, n / 2) == Approx(0.5 + (n / 2.0 - 0.5) / (n - 1.0)).epsilon(1e-15));
    CHECK(analytic_threshold(n, n / 2) > 0.999);
    for (Index n2 : {100, 4000})
        for (Index d = 1; d + 1 < n2 / 2; ++d) CHECK(analytic_threshold(n2, d + 1) > analytic_threshold(n2, d));
    CHECK_THROWS_AS(analytic_threshold(10, 10), UsageError);
}

TEST_CASE("jackstraw with identical views and the identity permutation") {
    const auto toy = synthetic::generate_toy(120, 8);
    KernelParams p;
    const SpectralBasis bx = top_eigenbasis(build_kernel(toy.spiral, p), 10);
    Permutation identity(120);
    for (Index i = 0; i < 120; ++i) identity[static_cast<std::size_t>(i)] = i;
    const JackstrawResult r = jackstraw_threshold(bx, toy.spiral, p, {identity});
    CHECK(r.second_cosines[0] == Approx(1.0).epsilon(1e-10));
    CHECK(r.threshold == Approx(1.0).epsilon(1e-10));
    CHECK(jackstraw_threshold(bx, bx, {identity}).threshold == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("jackstraw basis permutation agrees with rebuilding the kernel") {
    // Small d keeps every retained eigenvalue well separated, so the permuted
    // kernel's eigenbasis is exactly the permuted basis.
    const auto toy = synthetic::generate_toy(300, 9);
    KernelParams p;
    const SpectralBasis bx = top_eigenbasis(build_kernel(toy.spiral, p), 12);
    const SpectralBasis by = top_eigenbasis(build_kernel(toy.torus, p), 12);
    const auto perms = seeded_permutations(300, 3, 4);
    const JackstrawResult rebuilt = jackstraw_threshold(bx, toy.torus, p, perms);
    const JackstrawResult permuted = jackstraw_threshold(bx, by, perms);
    for (std::size_t t = 0; t < perms.size(); ++t)
        CHECK(rebuilt.second_cosines[t] == Approx(permuted.second_cosines[t]).epsilon(1e-8));
    CHECK(rebuilt.threshold == Approx(permuted.threshold).epsilon(1e-8));
}

TEST_CASE("jackstraw is close to the analytic threshold for independent views") {
    // Monte Carlo over seeds with i.i.d. uniform views of moderate size.
    const Index n = 400, d = 100;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const Dataset x(testing::uniform_points(n, 3, 500 + seed));
        const Dataset y(testing::uniform_points(n, 3, 600 + seed));
        const SpectralBasis bx = top_eigenbasis(build_kernel(x, {}), d);
        const SpectralBasis by = top_eigenbasis(build_kernel(y, {}), d);
        const double e0 = jackstraw_threshold(bx, by, 5, seed).threshold;
        worst = std::max(worst, std::abs(e0 - analytic_threshold(n, d)));
    }
    CHECK(worst < 0.05);
}

TEST_CASE("jackstraw validation") {
    const Matrix a = testing::random_orthonormal(50, 5, 78);
    CHECK_THROWS_AS(jackstraw_threshold(basis_from(a), basis_from(a), 0, 1), UsageError);
    CHECK_THROWS_AS(jackstraw_threshold(basis_from(a), basis_from(a), {Permutation(50, 0)}), UsageError);
    const Matrix small = testing::random_orthonormal(3, 2, 79);
    CHECK_THROWS_AS(jackstraw_threshold(basis_from(small), basis_from(small), 1, 1), UsageError);
}

TEST_CASE("select_m takes the leading run over the minimum view score") {
    JsfModel m;
    m.functions = Matrix::Zero(10, 5);
    m.singular_values = Vector::Ones(5);
    m.scores = {(Vector(5) << 0.99, 0.97, 0.80, 0.99, 0.6).finished(),
                (Vector(5) << 0.98, 0.96, 0.97, 0.99, 0.6).finished()};
    CHECK(select_m(m, 0.95) == 2);
    CHECK(m.selected == 2);
    CHECK(m.threshold == 0.95);
    CHECK(select_m(m, 0.985) == 0);
    CHECK_THROWS_AS(select_m(m, 0.5), UsageError);
    CHECK_THROWS_AS(select_m(m, 1.01), UsageError);
}

}  // TEST_SUITE
