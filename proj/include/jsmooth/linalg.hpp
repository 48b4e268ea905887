#pragma once

#include "jsmooth/dataset.hpp"

namespace jsmooth {

struct Svd {
    Matrix u;       // m x r
    Vector values;  // r, non-increasing
    Matrix v;       // n x r
};

/// Thin SVD (r = min(m, n)) via LAPACK dgesdd.
Svd thin_svd(const Matrix& a);

/// Singular values only, non-increasing.
Vector singular_values(const Matrix& a);

/// Cosines of the principal angles between span(a) and span(b), for
/// matrices with orthonormal columns: the singular values of a^T b.
Vector principal_cosines(const Matrix& a, const Matrix& b);

}  // namespace jsmooth
