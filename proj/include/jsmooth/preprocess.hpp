#pragma once

#include "jsmooth/dataset.hpp"

namespace jsmooth {

/// Principal-component projection fitted on centered data.
struct PcaMap {
    Vector mean;        // p
    Matrix components;  // p x q, orthonormal columns
    Vector explained;   // q singular values of the centered data, non-increasing

    Index input_dim() const noexcept { return components.rows(); }
    Index output_dim() const noexcept { return components.cols(); }
};

/// Top-q principal components (1 <= q <= min(N, p)), signs canonicalized so
/// the largest-magnitude loading of each component is positive.
PcaMap pca_fit(const Matrix& data, Index q);
inline PcaMap pca_fit(const Dataset& data, Index q) { return pca_fit(data.values(), q); }

/// (x - mean) * components, row-wise.
Matrix pca_apply(const PcaMap& map, const Matrix& data);
Dataset pca_apply(const PcaMap& map, const Dataset& data);

/// mean + scores * components^T.
Matrix pca_reconstruct(const PcaMap& map, const Matrix& scores);

/// Row i of the result concatenates input rows i, i+1, ..., i+h.
Matrix delay_embed(const Matrix& data, Index horizon);
Dataset delay_embed(const Dataset& data, Index horizon);

}  // namespace jsmooth
