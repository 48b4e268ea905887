#include "jsmooth/kernels.hpp"

#include "jsmooth/error.hpp"
#include "jsmooth/knn.hpp"
#include "jsmooth/random.hpp"

#include <algorithm>
#include <cmath>

namespace jsmooth {

std::string to_string(KernelKind kind) {
    switch (kind) {
        case KernelKind::Gaussian: return "gaussian";
        case KernelKind::KnnContinuous: return "knn";
    }
    return "unknown";
}

KernelKind kernel_kind_from_string(const std::string& name) {
    if (name == "gaussian") return KernelKind::Gaussian;
    if (name == "knn" || name == "knn-continuous") return KernelKind::KnnContinuous;
    throw UsageError("unknown kernel kind '" + name + "' (expected gaussian|knn)");
}

// ---------------------------------------------------------------------------
// KernelMatrix
// ---------------------------------------------------------------------------

KernelMatrix::KernelMatrix(Matrix entries, KernelParams params)
    : entries_(std::move(entries)), params_(params) {
    n_ = dense().rows();
}

KernelMatrix::KernelMatrix(SparseMatrix entries, KernelParams params, Vector radii)
    : entries_(std::move(entries)), params_(params), radii_(std::move(radii)) {
    n_ = sparse().rows();
}

double KernelMatrix::coeff(Index i, Index j) const {
    return is_dense() ? dense()(i, j) : sparse().coeff(i, j);
}

Index KernelMatrix::nonzeros() const { return is_dense() ? n_ * n_ : sparse().nonZeros(); }

Matrix KernelMatrix::to_dense() const { return is_dense() ? dense() : Matrix(sparse()); }

void KernelMatrix::apply(const Vector& x, Vector& y) const {
    if (is_dense())
        y.noalias() = dense() * x;
    else
        y.noalias() = sparse() * x;
}

double KernelMatrix::max_asymmetry() const {
    if (is_dense()) return (dense() - dense().transpose()).cwiseAbs().maxCoeff();
    const SparseMatrix t = sparse().transpose();
    const SparseMatrix diff = sparse() - t;
    double worst = 0.0;
    for (Index i = 0; i < diff.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(diff, i); it; ++it) worst = std::max(worst, std::abs(it.value()));
    return worst;
}

// ---------------------------------------------------------------------------

namespace {

// Columns of `xt` are points.
double squared_distance(const Matrix& xt, Index i, Index j) {
    const double* a = xt.col(i).data();
    const double* b = xt.col(j).data();
    double s = 0.0;
    for (Index c = 0; c < xt.rows(); ++c) {
        const double d = a[c] - b[c];
        s += d * d;
    }
    return s;
}

double median_of(std::vector<double>& v) {
    const auto n = v.size();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    const double upper = *mid;
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

}  // namespace

double median_bandwidth(const Dataset& data, double factor, Index cap, std::uint64_t seed) {
    if (!(factor > 0.0)) throw UsageError("bandwidth factor must be positive");
    if (cap < 2) throw UsageError("median subsample cap must be at least 2");
    const Matrix* x = &data.values();
    Matrix subsample;
    if (data.rows() > cap) {
        Rng rng(seed);
        const auto rows = rng.sample_without_replacement(data.rows(), cap);
        subsample = data.select_rows(rows).values();
        x = &subsample;
    }
    const Index n = x->rows();
    // Column-major access per pair is slow for wide data; work on a transposed copy.
    const Matrix xt = x->transpose();
    std::vector<double> dist(static_cast<std::size_t>(n * (n - 1) / 2));
#pragma omp parallel for schedule(dynamic, 16)
    for (Index i = 0; i < n; ++i) {
        std::size_t at = static_cast<std::size_t>(i * (2 * n - i - 1) / 2);
        for (Index j = i + 1; j < n; ++j) dist[at++] = std::sqrt(squared_distance(xt, i, j));
    }
    const double median = median_of(dist);
    if (!(median > 0.0)) throw DataError("degenerate dataset: zero bandwidth");
    return factor * median;
}

namespace {

KernelMatrix make_gaussian(const Dataset& data, KernelParams params) {
    const double bandwidth = params.bandwidth;
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw UsageError("bandwidth must be positive and finite");
    const Matrix xt = data.values().transpose();
    const Index n = xt.cols();
    const double scale = 1.0 / (2.0 * bandwidth * bandwidth);
    Matrix k(n, n);
#pragma omp parallel for schedule(dynamic, 16)
    for (Index j = 0; j < n; ++j) {
        k(j, j) = 1.0;
        for (Index i = j + 1; i < n; ++i) k(i, j) = std::exp(-squared_distance(xt, i, j) * scale);
    }
    // Mirror the lower triangle so symmetry is exact.
    for (Index j = 0; j < n; ++j)
        for (Index i = j + 1; i < n; ++i) k(j, i) = k(i, j);

    params.kind = KernelKind::Gaussian;
    return KernelMatrix(std::move(k), params);
}

KernelMatrix make_knn(const Dataset& data, KernelParams params) {
    const Index k = params.k;
    const double delta = params.delta;
    const Index n = data.rows();
    if (k < 1 || k >= n) throw UsageError("knn kernel needs 1 <= k < N (k=" + std::to_string(k) + ", N=" + std::to_string(n) + ")");
    if (!(delta > 0.0)) throw UsageError("knn kernel delta must be positive");

    const Matrix& x = data.values();
    const Matrix xt = x.transpose();
    const KdTree tree(x);

    std::vector<std::vector<Neighbor>> neighbors(static_cast<std::size_t>(n));
    Vector radii(n);
#pragma omp parallel for schedule(dynamic, 64)
    for (Index i = 0; i < n; ++i) {
        auto nb = tree.query(xt.col(i).data(), k, i);
        radii(i) = nb.back().distance;
        neighbors[static_cast<std::size_t>(i)] = std::move(nb);
    }

    const double inv_delta2 = 1.0 / (delta * delta);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n * (k + 1)));
    for (Index i = 0; i < n; ++i) {
        triplets.emplace_back(i, i, 1.0);
        for (const Neighbor& nb : neighbors[static_cast<std::size_t>(i)]) {
            const double d2 = nb.distance * nb.distance;
            const double scale = radii(i) * radii(nb.index);
            double w;
            if (d2 == 0.0)
                w = 1.0;
            else if (scale > 0.0)
                w = std::exp(-d2 * inv_delta2 / scale);
            else
                w = 0.0;
            triplets.emplace_back(i, nb.index, w);
        }
    }
    SparseMatrix one_sided(n, n);
    one_sided.setFromTriplets(triplets.begin(), triplets.end());
    const SparseMatrix transposed = one_sided.transpose();
    SparseMatrix sym = (one_sided + transposed) * 0.5;
    sym.makeCompressed();

    params.kind = KernelKind::KnnContinuous;
    return KernelMatrix(std::move(sym), params, std::move(radii));
}

}  // namespace

KernelMatrix gaussian_kernel(const Dataset& data, double bandwidth) {
    KernelParams params;
    params.kind = KernelKind::Gaussian;
    params.bandwidth = bandwidth;
    return make_gaussian(data, params);
}

KernelMatrix knn_kernel(const Dataset& data, Index k, double delta) {
    KernelParams params;
    params.kind = KernelKind::KnnContinuous;
    params.k = k;
    params.delta = delta;
    return make_knn(data, params);
}

KernelParams resolve_params(const Dataset& data, const KernelParams& params) {
    KernelParams out = params;
    if (out.kind == KernelKind::Gaussian && !(out.bandwidth > 0.0))
        out.bandwidth = median_bandwidth(data, out.bandwidth_factor, out.median_cap, out.seed);
    return out;
}

KernelMatrix build_kernel(const Dataset& data, const KernelParams& params) {
    const KernelParams resolved = resolve_params(data, params);
    return resolved.kind == KernelKind::Gaussian ? make_gaussian(data, resolved) : make_knn(data, resolved);
}

}  // namespace jsmooth
