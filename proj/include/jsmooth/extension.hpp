#pragma once

#include "jsmooth/dataset.hpp"
#include "jsmooth/jsf.hpp"
#include "jsmooth/kernels.hpp"
#include "jsmooth/knn.hpp"
#include "jsmooth/spectral.hpp"

#include <memory>
#include <vector>

namespace jsmooth {

/// Everything one view contributes to the out-of-sample extension.
struct ExtensionView {
    Dataset train;
    KernelParams params;           // resolved (bandwidth set for Gaussian)
    Vector eigenvalues;            // d
    std::vector<Index> retained;   // eigen-directions used (|lambda| > cutoff)
    Matrix coefficients;           // alpha = W^T U[:, :M], d x M
    Matrix weights;                // W_r Lambda_r^-1 alpha_r, N x M
    Vector radii;                  // k-NN scales of the training points (knn kernels)
};

/// Precomputed Nystrom extension of the first M jointly smooth functions.
/// Immutable once built; extend() is safe to call concurrently.
class ExtensionModel {
public:
    ExtensionModel() = default;
    explicit ExtensionModel(std::vector<ExtensionView> views);

    Index views() const noexcept { return static_cast<Index>(views_.size()); }
    Index functions() const noexcept { return views_.empty() ? 0 : views_.front().weights.cols(); }
    const ExtensionView& view(Index k) const { return views_.at(static_cast<std::size_t>(k)); }

    /// Cross-kernel row k*(q) between a query and the training points of view k.
    Vector cross_kernel(Index view, const double* query) const;

    /// Extension from view k alone: k*(q) W Lambda^-1 alpha. This is the
    /// per-view partial variant; it does not enforce agreement across views.
    void extend_view_row(Index view, const double* query, double* out) const;

    /// Equal-weight mean of the per-view extensions for one observation tuple
    /// (one query pointer per view).
    void extend_row(const std::vector<const double*>& queries, double* out) const;

private:
    std::vector<ExtensionView> views_;
    std::vector<std::shared_ptr<const KdTree>> trees_;  // knn views only
};

/// Eigen-directions with |lambda_i| <= cutoff_ratio * lambda_1 are dropped.
ExtensionModel build_extender(const JsfModel& model, const std::vector<SpectralBasis>& bases,
                              const std::vector<Dataset>& datasets, double cutoff_ratio = 1e-8);

/// f* for N* new observation tuples: one N* x p_k matrix per view, aligned
/// by row. Rows are processed independently, so batch and single-row calls
/// give identical results.
Matrix extend(const ExtensionModel& extender, const std::vector<Matrix>& points);

/// Per-view partial extension (only one view of the new tuple observed).
Matrix extend_view(const ExtensionModel& extender, Index view, const Matrix& points);

}  // namespace jsmooth
