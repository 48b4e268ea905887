#include "jsmooth/linalg.hpp"

#include "jsmooth/error.hpp"

#include <lapacke.h>

#include <algorithm>

namespace jsmooth {

Svd thin_svd(const Matrix& a) {
    const Index m = a.rows(), n = a.cols(), r = std::min(m, n);
    Svd out;
    if (r == 0) return out;
    Matrix work = a;
    out.u.resize(m, r);
    out.values.resize(r);
    Matrix vt(r, n);
    const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', static_cast<lapack_int>(m),
                                           static_cast<lapack_int>(n), work.data(), static_cast<lapack_int>(m),
                                           out.values.data(), out.u.data(), static_cast<lapack_int>(m), vt.data(),
                                           static_cast<lapack_int>(r));
    if (info != 0) throw NumericalError("dgesdd failed (info=" + std::to_string(info) + ")");
    out.v = vt.transpose();
    return out;
}

Vector singular_values(const Matrix& a) {
    const Index m = a.rows(), n = a.cols(), r = std::min(m, n);
    Vector s(r);
    if (r == 0) return s;
    Matrix work = a;
    const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', static_cast<lapack_int>(m),
                                           static_cast<lapack_int>(n), work.data(), static_cast<lapack_int>(m),
                                           s.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw NumericalError("dgesdd failed (info=" + std::to_string(info) + ")");
    return s;
}

Vector principal_cosines(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw UsageError("principal angles need equal row counts");
    Vector c = singular_values(a.transpose() * b);
    return c.cwiseMin(1.0);
}

}  // namespace jsmooth
