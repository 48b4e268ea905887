#pragma once

#include "jsmooth/dataset.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <string>
#include <variant>

namespace jsmooth {

enum class KernelKind { Gaussian, KnnContinuous };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

/// Construction parameters of a kernel. For Gaussian kernels a non-positive
/// `bandwidth` means "derive it as bandwidth_factor x median pairwise distance".
struct KernelParams {
    KernelKind kind = KernelKind::Gaussian;
    double bandwidth = 0.0;
    double bandwidth_factor = 0.3;
    Index k = 25;
    double delta = 1.0;
    Index median_cap = 5000;
    std::uint64_t seed = 0;

    bool operator==(const KernelParams&) const = default;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Symmetric nonnegative affinity matrix, dense or sparse.
class KernelMatrix {
public:
    KernelMatrix() = default;
    KernelMatrix(Matrix entries, KernelParams params);
    KernelMatrix(SparseMatrix entries, KernelParams params, Vector radii);

    Index n() const noexcept { return n_; }
    bool is_dense() const noexcept { return std::holds_alternative<Matrix>(entries_); }
    KernelKind kind() const noexcept { return params_.kind; }
    const KernelParams& params() const noexcept { return params_; }

    const Matrix& dense() const { return std::get<Matrix>(entries_); }
    const SparseMatrix& sparse() const { return std::get<SparseMatrix>(entries_); }

    /// Per-point scale r_i of the continuous k-NN construction (empty for Gaussian).
    const Vector& radii() const noexcept { return radii_; }

    double coeff(Index i, Index j) const;
    Index nonzeros() const;
    Matrix to_dense() const;

    /// y = K x
    void apply(const Vector& x, Vector& y) const;

    double max_asymmetry() const;

private:
    std::variant<Matrix, SparseMatrix> entries_;
    KernelParams params_;
    Vector radii_;
    Index n_ = 0;
};

/// factor x median of the pairwise Euclidean distances. Above `cap` rows the
/// median is taken over a seeded uniform subsample of `cap` rows.
double median_bandwidth(const Dataset& data, double factor = 0.3, Index cap = 5000,
                        std::uint64_t seed = 0);

/// Dense exp(-|x_i - x_j|^2 / (2 sigma^2)).
KernelMatrix gaussian_kernel(const Dataset& data, double bandwidth);

/// Sparse continuous k-nearest-neighbor kernel.
///
/// r_i is the distance from x_i to its k-th nearest neighbor; each point is
/// linked to its k neighbors with weight exp(-|x_i - x_j|^2 / (delta^2 r_i r_j)),
/// the diagonal is 1, and the result is symmetrized as (K + K^T) / 2.
KernelMatrix knn_kernel(const Dataset& data, Index k, double delta);

/// Builds the kernel described by `params`, resolving an automatic Gaussian
/// bandwidth. The returned matrix carries the resolved parameters.
KernelMatrix build_kernel(const Dataset& data, const KernelParams& params);

/// Resolves an automatic bandwidth without building the kernel.
KernelParams resolve_params(const Dataset& data, const KernelParams& params);

}  // namespace jsmooth
