#include "jsmooth/preprocess.hpp"

#include "jsmooth/error.hpp"
#include "jsmooth/linalg.hpp"
#include "jsmooth/spectral.hpp"

#include <algorithm>

namespace jsmooth {

PcaMap pca_fit(const Matrix& data, Index q) {
    const Index n = data.rows(), p = data.cols();
    if (q < 1 || q > std::min(n, p))
        throw UsageError("PCA needs 1 <= q <= min(N, p) (q=" + std::to_string(q) + ", N=" + std::to_string(n) +
                         ", p=" + std::to_string(p) + ")");
    if (!data.allFinite()) throw DataError("PCA input contains non-finite values");

    PcaMap map;
    map.mean = data.colwise().mean().transpose();
    const Matrix centered = data.rowwise() - map.mean.transpose();
    Svd svd = thin_svd(centered);
    map.components = svd.v.leftCols(q);
    map.explained = svd.values.head(q);
    canonicalize_signs(map.components);
    return map;
}

Matrix pca_apply(const PcaMap& map, const Matrix& data) {
    if (data.cols() != map.input_dim())
        throw DataError("PCA expects " + std::to_string(map.input_dim()) + " columns, got " + std::to_string(data.cols()));
    return (data.rowwise() - map.mean.transpose()) * map.components;
}

Dataset pca_apply(const PcaMap& map, const Dataset& data) {
    return Dataset(pca_apply(map, data.values()), data.view_id());
}

Matrix pca_reconstruct(const PcaMap& map, const Matrix& scores) {
    if (scores.cols() != map.output_dim()) throw DataError("PCA scores have the wrong dimension");
    return (scores * map.components.transpose()).rowwise() + map.mean.transpose();
}

Matrix delay_embed(const Matrix& data, Index horizon) {
    const Index n = data.rows(), p = data.cols();
    if (horizon < 1) throw UsageError("delay horizon must be at least 1");
    if (horizon >= n)
        throw UsageError("delay horizon " + std::to_string(horizon) + " needs more than " + std::to_string(horizon) +
                         " rows, got " + std::to_string(n));
    const Index rows = n - horizon;
    Matrix out(rows, p * (horizon + 1));
    for (Index i = 0; i < rows; ++i)
        for (Index lag = 0; lag <= horizon; ++lag) out.row(i).segment(lag * p, p) = data.row(i + lag);
    return out;
}

Dataset delay_embed(const Dataset& data, Index horizon) {
    return Dataset(delay_embed(data.values(), horizon), data.view_id());
}

}  // namespace jsmooth
