#pragma once

#include "jsmooth/dataset.hpp"
#include "jsmooth/random.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace testing {

using jsmooth::Index;
using jsmooth::Matrix;
using jsmooth::Vector;

inline Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
    jsmooth::Rng rng(seed);
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

/// Orthonormal columns via Householder QR of a Gaussian matrix.
inline Matrix random_orthonormal(Index rows, Index cols, std::uint64_t seed) {
    const Matrix g = gaussian_matrix(rows, cols, seed);
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(rows, cols);
}

inline Matrix uniform_points(Index rows, Index cols, std::uint64_t seed) {
    jsmooth::Rng rng(seed);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform();
    return m;
}

/// Points on the unit circle at angles 2 pi i / n.
inline Matrix circle_points(Index n) {
    Matrix m(n, 2);
    for (Index i = 0; i < n; ++i) {
        const double t = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
        m.row(i) << std::cos(t), std::sin(t);
    }
    return m;
}

/// Largest principal angle (radians) between the column spans of a and b,
/// both with orthonormal columns and equal width.
inline double subspace_angle(const Matrix& a, const Matrix& b) {
    Eigen::JacobiSVD<Matrix> svd(a.transpose() * b);
    const double smallest = svd.singularValues().minCoeff();
    return std::acos(std::min(1.0, smallest));
}

/// Full symmetric eigendecomposition, descending.
inline void dense_eigen(const Matrix& a, Vector& values, Matrix& vectors) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    values = es.eigenvalues().reverse();
    vectors = es.eigenvectors().rowwise().reverse();
}

}  // namespace testing
