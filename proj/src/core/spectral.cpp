#include "jsmooth/spectral.hpp"

#include "jsmooth/error.hpp"
#include "jsmooth/random.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jsmooth {

namespace {

Vector random_unit(Rng& rng, Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = rng.normal();
    return v / v.norm();
}

// Two passes of classical Gram-Schmidt against the columns of `basis`.
template <typename Basis>
void orthogonalize(const Basis& basis, Vector& w) {
    if (basis.cols() == 0) return;
    for (int pass = 0; pass < 2; ++pass) {
        const Vector h = basis.transpose() * w;
        w.noalias() -= basis * h;
    }
}

Vector true_residuals(const SymmetricOperator& op, const Matrix& vectors, const Vector& values) {
    Vector res(values.size());
    Vector x, y(op.n);
    for (Index i = 0; i < values.size(); ++i) {
        x = vectors.col(i);
        op.apply(x, y);
        res(i) = (y - values(i) * x).norm();
    }
    return res;
}

}  // namespace

EigenPairs lanczos_largest(const SymmetricOperator& op, Index count, const EigenOptions& options) {
    const Index n = op.n;
    if (count < 1 || count >= n)
        throw UsageError("eigensolver needs 1 <= d < N (d=" + std::to_string(count) + ", N=" + std::to_string(n) + ")");

    Index m = options.subspace > 0 ? options.subspace : std::max(2 * count + 1, count + 20);
    m = std::clamp(m, count + 1, n);

    Rng rng(options.seed);
    Matrix basis(n, m);
    Matrix tri = Matrix::Zero(m, m);  // projected operator V^T A V
    basis.col(0) = random_unit(rng, n);

    Vector w(n), x(n), residual(n);
    double beta_last = 0.0;
    double anorm = 0.0;
    Index kept = 0;
    EigenPairs out;
    Eigen::SelfAdjointEigenSolver<Matrix> projected;

    while (true) {
        for (Index j = kept; j < m; ++j) {
            x = basis.col(j);
            op.apply(x, w);
            ++out.products;

            const auto prev = basis.leftCols(j + 1);
            Vector h = prev.transpose() * w;
            w.noalias() -= prev * h;
            const Vector h2 = prev.transpose() * w;
            w.noalias() -= prev * h2;
            h += h2;
            tri.col(j).head(j + 1) = h;
            tri.row(j).head(j + 1) = h.transpose();
            anorm = std::max(anorm, std::abs(h(j)));

            const double beta = w.norm();
            if (j + 1 == m) {
                residual = w;
                beta_last = beta;
                break;
            }
            if (beta <= 1e-13 * std::max(anorm, 1e-300)) {
                // Invariant subspace found; continue with a fresh orthogonal direction.
                Vector fresh = random_unit(rng, n);
                orthogonalize(prev, fresh);
                basis.col(j + 1) = fresh / fresh.norm();
                tri(j + 1, j) = tri(j, j + 1) = 0.0;
            } else {
                basis.col(j + 1) = w / beta;
                tri(j + 1, j) = tri(j, j + 1) = beta;
            }
        }

        projected.compute(tri);
        const Vector theta = projected.eigenvalues().reverse();
        const Matrix ritz = projected.eigenvectors().rowwise().reverse();
        anorm = std::max({anorm, std::abs(theta(0)), std::abs(theta(m - 1))});
        const Vector estimates = (beta_last * ritz.row(m - 1).transpose()).cwiseAbs();
        const double threshold = options.tol * std::max(anorm, 1e-300);
        const bool converged = (estimates.head(count).array() <= threshold).all() || m == n;

        if (converged) {
            out.vectors = basis * ritz.leftCols(count);
            out.values = theta.head(count);
            out.residuals = true_residuals(op, out.vectors, out.values);
            return out;
        }
        if (out.restarts >= options.max_restarts) {
            std::vector<double> res(estimates.data(), estimates.data() + count);
            std::ostringstream msg;
            msg << "Lanczos did not converge after " << out.restarts << " restarts (max residual "
                << estimates.head(count).maxCoeff() << ", target " << threshold << ")";
            throw ConvergenceError(msg.str(), std::move(res));
        }

        // Thick restart: keep the leading Ritz vectors, continue from the residual.
        const Index keep = std::min(m - 1, count + (m - count) / 2);
        const Matrix kept_vectors = basis * ritz.leftCols(keep);
        basis.leftCols(keep) = kept_vectors;
        tri.setZero();
        tri.diagonal().head(keep) = theta.head(keep);
        if (beta_last > 1e-13 * anorm) {
            basis.col(keep) = residual / beta_last;
        } else {
            Vector fresh = random_unit(rng, n);
            orthogonalize(basis.leftCols(keep), fresh);
            basis.col(keep) = fresh / fresh.norm();
        }
        kept = keep;
        ++out.restarts;
    }
}

EigenPairs dense_largest(const Matrix& a, Index count) {
    const Index n = a.rows();
    if (a.cols() != n) throw UsageError("dense eigensolver needs a square matrix");
    if (count < 1 || count >= n)
        throw UsageError("eigensolver needs 1 <= d < N (d=" + std::to_string(count) + ", N=" + std::to_string(n) + ")");

    Matrix work = a;
    Vector values(n);
    Matrix vectors(n, count);
    std::vector<lapack_int> support(static_cast<std::size_t>(2 * count));
    lapack_int found = 0;
    const auto ln = static_cast<lapack_int>(n);
    const lapack_int info =
        LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', ln, work.data(), ln, 0.0, 0.0,
                       static_cast<lapack_int>(n - count + 1), ln, 0.0, &found, values.data(),
                       vectors.data(), ln, support.data());
    if (info != 0 || found != count)
        throw NumericalError("dsyevr failed (info=" + std::to_string(info) + ")");

    EigenPairs out;
    out.values = values.head(count).reverse();
    out.vectors = vectors.rowwise().reverse();
    // Residuals column by column to avoid a second N x N temporary.
    out.residuals.resize(count);
    Vector y(n);
    for (Index i = 0; i < count; ++i) {
        y.noalias() = a.selfadjointView<Eigen::Lower>() * out.vectors.col(i);
        out.residuals(i) = (y - out.values(i) * out.vectors.col(i)).norm();
    }
    return out;
}

void canonicalize_signs(Matrix& columns) {
    for (Index j = 0; j < columns.cols(); ++j) {
        Index at = 0;
        columns.col(j).cwiseAbs().maxCoeff(&at);
        if (columns(at, j) < 0.0) columns.col(j) *= -1.0;
    }
}

SpectralBasis SpectralBasis::truncated(Index d) const {
    if (d < 1 || d > this->d()) throw UsageError("cannot truncate basis to d=" + std::to_string(d));
    return SpectralBasis{vectors.leftCols(d), eigenvalues.head(d), source};
}

SpectralBasis top_eigenbasis(const KernelMatrix& kernel, Index d, const EigenOptions& options) {
    const Index n = kernel.n();
    if (d < 1 || d >= n)
        throw UsageError("basis dimension must satisfy 1 <= d < N (d=" + std::to_string(d) + ", N=" + std::to_string(n) + ")");

    EigenMethod method = options.method;
    if (method == EigenMethod::Auto)
        method = (kernel.is_dense() && (5 * d >= n || n <= 300)) ? EigenMethod::Dense : EigenMethod::Lanczos;

    EigenPairs pairs;
    if (method == EigenMethod::Dense) {
        pairs = kernel.is_dense() ? dense_largest(kernel.dense(), d) : dense_largest(kernel.to_dense(), d);
    } else {
        SymmetricOperator op{n, [&kernel](const Vector& x, Vector& y) { kernel.apply(x, y); }};
        pairs = lanczos_largest(op, d, options);
    }
    canonicalize_signs(pairs.vectors);

    // Gaussian kernels are PSD; eigenvalues within rounding of zero are not
    // worth a warning there. Other kinds warn on anything non-positive.
    const double floor =
        kernel.kind() == KernelKind::Gaussian ? -1e-10 * std::abs(pairs.values(0)) : 0.0;
    if (pairs.values(d - 1) <= floor) {
        Index nonpositive = 0;
        for (Index i = 0; i < d; ++i) nonpositive += pairs.values(i) <= floor;
        warn(std::to_string(nonpositive) + " of the " + std::to_string(d) +
             " selected eigenvalues are non-positive (kernel is not PSD)");
    }
    return SpectralBasis{std::move(pairs.vectors), std::move(pairs.values), kernel.params()};
}

Index default_basis_dimension(Index n) { return std::max<Index>(1, std::min<Index>(n / 4, 2000)); }

double smoothness_score(const SpectralBasis& basis, const Vector& f) {
    if (f.size() != basis.n())
        throw UsageError("function length " + std::to_string(f.size()) + " does not match basis size " +
                         std::to_string(basis.n()));
    if (!f.allFinite()) throw UsageError("function has non-finite entries");
    return (basis.vectors.transpose() * f).squaredNorm();
}

bool is_d_smooth(const SpectralBasis& basis, const Vector& f, double tol) {
    const double norm2 = f.squaredNorm();
    if (!(norm2 > 0.0)) throw UsageError("d-smoothness is undefined for the zero vector");
    return std::abs(smoothness_score(basis, f) / norm2 - 1.0) <= tol;
}

}  // namespace jsmooth
