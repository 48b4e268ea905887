#include "jsmooth/extension.hpp"

#include "jsmooth/error.hpp"

#include <cmath>

namespace jsmooth {

ExtensionModel::ExtensionModel(std::vector<ExtensionView> views) : views_(std::move(views)) {
    if (views_.empty()) throw UsageError("extension needs at least one view");
    const Index m = views_.front().weights.cols();
    for (const auto& v : views_) {
        if (v.weights.cols() != m) throw DataError("extension views disagree on M");
        if (v.weights.rows() != v.train.rows()) throw DataError("extension weights do not match training rows");
        if (v.params.kind == KernelKind::KnnContinuous && v.radii.size() != v.train.rows())
            throw DataError("knn extension view is missing its training radii");
    }
    trees_.resize(views_.size());
    for (std::size_t k = 0; k < views_.size(); ++k)
        if (views_[k].params.kind == KernelKind::KnnContinuous)
            trees_[k] = std::make_shared<const KdTree>(views_[k].train.values());
}

Vector ExtensionModel::cross_kernel(Index view, const double* query) const {
    const ExtensionView& v = this->view(view);
    const Matrix& x = v.train.values();
    const Index n = x.rows(), p = x.cols();
    Vector row = Vector::Zero(n);
    if (v.params.kind == KernelKind::Gaussian) {
        const double scale = 1.0 / (2.0 * v.params.bandwidth * v.params.bandwidth);
        for (Index j = 0; j < n; ++j) {
            double d2 = 0.0;
            for (Index c = 0; c < p; ++c) {
                const double diff = query[c] - x(j, c);
                d2 += diff * diff;
            }
            row(j) = std::exp(-d2 * scale);
        }
        return row;
    }
    // Continuous k-NN: the query's own k-th neighbor distance against the
    // training-side scales.
    const auto neighbors = trees_[static_cast<std::size_t>(view)]->query(query, v.params.k);
    const double r_query = neighbors.back().distance;
    const double inv_delta2 = 1.0 / (v.params.delta * v.params.delta);
    for (const Neighbor& nb : neighbors) {
        const double d2 = nb.distance * nb.distance;
        const double scale = r_query * v.radii(nb.index);
        row(nb.index) = d2 == 0.0 ? 1.0 : (scale > 0.0 ? std::exp(-d2 * inv_delta2 / scale) : 0.0);
    }
    return row;
}

void ExtensionModel::extend_view_row(Index view, const double* query, double* out) const {
    const Vector k = cross_kernel(view, query);
    const Matrix& w = this->view(view).weights;
    for (Index m = 0; m < w.cols(); ++m) out[m] = k.dot(w.col(m));
}

void ExtensionModel::extend_row(const std::vector<const double*>& queries, double* out) const {
    if (static_cast<Index>(queries.size()) != views()) throw UsageError("extension needs one query per view");
    const Index m = functions();
    std::vector<double> partial(static_cast<std::size_t>(m));
    for (Index j = 0; j < m; ++j) out[j] = 0.0;
    for (Index k = 0; k < views(); ++k) {
        extend_view_row(k, queries[static_cast<std::size_t>(k)], partial.data());
        for (Index j = 0; j < m; ++j) out[j] += partial[static_cast<std::size_t>(j)];
    }
    const double inv = 1.0 / static_cast<double>(views());
    for (Index j = 0; j < m; ++j) out[j] *= inv;
}

// ---------------------------------------------------------------------------

ExtensionModel build_extender(const JsfModel& model, const std::vector<SpectralBasis>& bases,
                              const std::vector<Dataset>& datasets, double cutoff_ratio) {
    if (model.selected < 1) throw UsageError("extension needs M >= 1 selected functions");
    if (bases.size() != datasets.size() || static_cast<Index>(bases.size()) != model.views())
        throw UsageError("extension needs one basis and one dataset per model view");
    const Index m = model.selected;
    const Index d = model.basis_dimension;

    std::vector<ExtensionView> views;
    for (std::size_t k = 0; k < bases.size(); ++k) {
        const SpectralBasis& basis = bases[k];
        const Dataset& data = datasets[k];
        if (basis.n() != model.n() || data.rows() != model.n())
            throw DataError("view " + std::to_string(k) + " does not match the model's N");
        if (basis.d() < d) throw DataError("view " + std::to_string(k) + " basis is smaller than the model's d");
        if (basis.source.kind == KernelKind::Gaussian && !(basis.source.bandwidth > 0.0))
            throw DataError("view " + std::to_string(k) + " basis has no resolved bandwidth");

        ExtensionView v;
        v.train = data;
        v.params = basis.source;
        v.eigenvalues = basis.eigenvalues.head(d);
        v.coefficients = basis.vectors.leftCols(d).transpose() * model.functions.leftCols(m);

        const double cutoff = cutoff_ratio * v.eigenvalues(0);
        for (Index i = 0; i < d; ++i)
            if (std::abs(v.eigenvalues(i)) > cutoff && v.eigenvalues(0) > 0.0) v.retained.push_back(i);
        if (v.retained.empty()) throw NumericalError("extension ill-posed: every eigenvalue is below the cutoff");

        v.weights = Matrix::Zero(model.n(), m);
        for (Index i : v.retained)
            v.weights.noalias() += basis.vectors.col(i) * (v.coefficients.row(i) / v.eigenvalues(i));

        if (v.params.kind == KernelKind::KnnContinuous) {
            const KernelMatrix kernel = build_kernel(data, v.params);
            v.radii = kernel.radii();
        }
        views.push_back(std::move(v));
    }
    return ExtensionModel(std::move(views));
}

Matrix extend(const ExtensionModel& extender, const std::vector<Matrix>& points) {
    if (static_cast<Index>(points.size()) != extender.views())
        throw UsageError("extension needs new points for every view");
    const Index rows = points.front().rows();
    std::vector<Matrix> row_major;  // contiguous rows
    for (Index k = 0; k < extender.views(); ++k) {
        const Matrix& p = points[static_cast<std::size_t>(k)];
        if (p.rows() != rows) throw DataError("new points are not aligned across views");
        if (p.cols() != extender.view(k).train.cols())
            throw DataError("view " + std::to_string(k) + " expects " + std::to_string(extender.view(k).train.cols()) +
                            " coordinates, got " + std::to_string(p.cols()));
        row_major.push_back(p.transpose());
    }
    Matrix out(rows, extender.functions());
    std::vector<double> row(static_cast<std::size_t>(extender.functions()));
    std::vector<const double*> queries(points.size());
    for (Index i = 0; i < rows; ++i) {
        for (std::size_t k = 0; k < points.size(); ++k) queries[k] = row_major[k].col(i).data();
        extender.extend_row(queries, row.data());
        for (Index j = 0; j < extender.functions(); ++j) out(i, j) = row[static_cast<std::size_t>(j)];
    }
    return out;
}

Matrix extend_view(const ExtensionModel& extender, Index view, const Matrix& points) {
    if (view < 0 || view >= extender.views()) throw UsageError("view index out of range");
    if (points.cols() != extender.view(view).train.cols()) throw DataError("new points have the wrong dimension");
    const Matrix rows = points.transpose();
    Matrix out(points.rows(), extender.functions());
    std::vector<double> row(static_cast<std::size_t>(extender.functions()));
    for (Index i = 0; i < points.rows(); ++i) {
        extender.extend_view_row(view, rows.col(i).data(), row.data());
        for (Index j = 0; j < extender.functions(); ++j) out(i, j) = row[static_cast<std::size_t>(j)];
    }
    return out;
}

}  // namespace jsmooth
