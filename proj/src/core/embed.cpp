#include "jsmooth/embed.hpp"

#include "jsmooth/error.hpp"
#include "jsmooth/kernels.hpp"

#include <cmath>

namespace jsmooth {

Matrix markov_matrix(const Matrix& kernel) {
    const Vector degree = kernel.rowwise().sum();
    if ((degree.array() <= 0.0).any()) throw NumericalError("kernel has a zero-degree row");
    return degree.cwiseInverse().asDiagonal() * kernel;
}

DiffusionEmbedding diffusion_maps(const Matrix& features, Index m, double bandwidth, const EigenOptions& options) {
    if (features.cols() < 1) throw UsageError("diffusion maps need at least one feature column");
    if (m < 1) throw UsageError("diffusion maps need m >= 1 coordinates");
    if (m + 1 >= features.rows()) throw UsageError("diffusion maps need m + 1 < N");
    const Dataset data(features, "features");

    bool degenerate = true;
    for (Index i = 1; i < features.rows() && degenerate; ++i) degenerate = features.row(i) == features.row(0);
    if (degenerate) throw DataError("degenerate kernel: all feature rows are identical");

    if (!(bandwidth > 0.0)) bandwidth = median_bandwidth(data, 0.3);
    const KernelMatrix k = gaussian_kernel(data, bandwidth);

    const Vector degree = k.dense().rowwise().sum();
    const Vector inv_sqrt = degree.cwiseSqrt().cwiseInverse();
    Matrix conjugate = inv_sqrt.asDiagonal() * k.dense() * inv_sqrt.asDiagonal();
    // Re-symmetrize exactly; the diagonal scalings round differently per side.
    conjugate = 0.5 * (conjugate + conjugate.transpose()).eval();

    KernelParams params = k.params();
    const SpectralBasis basis = top_eigenbasis(KernelMatrix(std::move(conjugate), params), m + 1, options);

    // psi = D^-1/2 v, scaled so the trivial mode is the constant 1.
    const double scale = std::sqrt(degree.sum());
    DiffusionEmbedding out;
    out.bandwidth = bandwidth;
    out.eigenvalues = basis.eigenvalues.segment(1, m);
    out.coordinates.resize(features.rows(), m);
    for (Index i = 0; i < m; ++i) {
        const Vector psi = inv_sqrt.cwiseProduct(basis.vectors.col(i + 1)) * scale;
        out.coordinates.col(i) = out.eigenvalues(i) * psi;
    }
    return out;
}

}  // namespace jsmooth
