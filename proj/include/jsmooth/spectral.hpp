#pragma once

#include "jsmooth/dataset.hpp"
#include "jsmooth/kernels.hpp"

#include <cstdint>
#include <functional>

namespace jsmooth {

enum class EigenMethod {
    Auto,     // direct solve for dense kernels when d is a sizable fraction of N
    Lanczos,  // thick-restart Lanczos on matrix-vector products
    Dense,    // LAPACK dsyevr on the full matrix
};

struct EigenOptions {
    EigenMethod method = EigenMethod::Auto;
    double tol = 1e-12;       // residual |A w - lambda w| relative to |A|
    int max_restarts = 1000;
    Index subspace = 0;       // Krylov subspace size; 0 = max(2d + 1, d + 20)
    std::uint64_t seed = 0;   // starting vector
};

/// Symmetric linear operator of size n: y = A x.
struct SymmetricOperator {
    Index n = 0;
    std::function<void(const Vector& x, Vector& y)> apply;
};

/// Eigenpairs sorted by descending algebraic value.
struct EigenPairs {
    Matrix vectors;
    Vector values;
    Vector residuals;  // |A w - lambda w| per pair
    int restarts = 0;
    Index products = 0;  // operator applications
};

/// Largest-algebraic eigenpairs by thick-restart Lanczos with full
/// reorthogonalization. Throws ConvergenceError carrying the Ritz residuals
/// when `max_restarts` is exhausted.
EigenPairs lanczos_largest(const SymmetricOperator& op, Index count, const EigenOptions& options = {});

/// Largest-algebraic eigenpairs of a dense symmetric matrix by LAPACK dsyevr.
EigenPairs dense_largest(const Matrix& a, Index count);

/// Flip each column so its largest-magnitude entry is positive (first such
/// entry on exact ties).
void canonicalize_signs(Matrix& columns);

/// The d leading eigenvectors of one kernel.
struct SpectralBasis {
    Matrix vectors;      // N x d, orthonormal columns
    Vector eigenvalues;  // length d, non-increasing
    KernelParams source;

    Index n() const noexcept { return vectors.rows(); }
    Index d() const noexcept { return vectors.cols(); }

    /// First `d` columns / eigenvalues.
    SpectralBasis truncated(Index d) const;
};

/// d algebraically largest eigenpairs of `kernel`, signs canonicalized.
SpectralBasis top_eigenbasis(const KernelMatrix& kernel, Index d, const EigenOptions& options = {});

/// Default truncation: N/4 capped at 2000 (at least 1).
Index default_basis_dimension(Index n);

/// d-truncated smoothness score |W^T f|^2.
double smoothness_score(const SpectralBasis& basis, const Vector& f);

/// |score(f) / |f|^2 - 1| <= tol.
bool is_d_smooth(const SpectralBasis& basis, const Vector& f, double tol);

}  // namespace jsmooth
