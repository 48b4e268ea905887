#include "jsmooth/metrics.hpp"

#include "jsmooth/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace jsmooth {

namespace {

void check_pair(const Vector& a, const Vector& b, const char* what) {
    if (a.size() != b.size()) throw UsageError(std::string(what) + ": samples differ in length");
    if (a.size() < 2) throw UsageError(std::string(what) + ": need at least two samples");
}

// Row means and grand mean of the distance matrix |v_i - v_j|.
void distance_means(const Vector& v, Vector& row_mean, double& grand) {
    const Index n = v.size();
    row_mean.resize(n);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) row_mean(i) = (v.array() - v(i)).abs().sum() / static_cast<double>(n);
    grand = row_mean.mean();
}

}  // namespace

double distance_correlation(const Vector& a, const Vector& b) {
    check_pair(a, b, "distance correlation");
    const Index n = a.size();
    Vector ra, rb;
    double ga = 0.0, gb = 0.0;
    distance_means(a, ra, ga);
    distance_means(b, rb, gb);

    // Double-centered entries are recomputed on the fly to keep memory O(N).
    double vab = 0.0, vaa = 0.0, vbb = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : vab, vaa, vbb)
    for (Index i = 0; i < n; ++i) {
        double sab = 0.0, saa = 0.0, sbb = 0.0;
        for (Index j = 0; j < n; ++j) {
            const double x = std::abs(a(i) - a(j)) - ra(i) - ra(j) + ga;
            const double y = std::abs(b(i) - b(j)) - rb(i) - rb(j) + gb;
            sab += x * y;
            saa += x * x;
            sbb += y * y;
        }
        vab += sab;
        vaa += saa;
        vbb += sbb;
    }
    if (vaa <= 0.0 || vbb <= 0.0) return 0.0;
    return std::sqrt(std::max(0.0, vab) / std::sqrt(vaa * vbb));
}

double pearson(const Vector& a, const Vector& b) {
    check_pair(a, b, "pearson");
    const Vector ca = a.array() - a.mean();
    const Vector cb = b.array() - b.mean();
    const double denom = ca.norm() * cb.norm();
    return denom > 0.0 ? ca.dot(cb) / denom : 0.0;
}

namespace {

Vector ranks(const Vector& v) {
    const Index n = v.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return v(i) < v(j); });
    Vector r(n);
    for (Index s = 0; s < n;) {
        Index e = s + 1;
        while (e < n && v(order[static_cast<std::size_t>(e)]) == v(order[static_cast<std::size_t>(s)])) ++e;
        const double avg = 0.5 * static_cast<double>(s + e - 1);
        for (Index t = s; t < e; ++t) r(order[static_cast<std::size_t>(t)]) = avg;
        s = e;
    }
    return r;
}

}  // namespace

double spearman(const Vector& a, const Vector& b) {
    check_pair(a, b, "spearman");
    return pearson(ranks(a), ranks(b));
}

double relative_rmse(const Vector& estimate, const Vector& reference) {
    if (estimate.size() != reference.size()) throw UsageError("relative RMSE: length mismatch");
    const double denom = reference.norm();
    if (denom == 0.0) throw UsageError("relative RMSE: zero reference");
    return (estimate - reference).norm() / denom;
}

double conditional_variance_ratio(const Vector& values, const Vector& key, Index bins) {
    check_pair(values, key, "conditional variance");
    if (bins < 1) throw UsageError("conditional variance: bins must be positive");
    const double lo = key.minCoeff(), hi = key.maxCoeff();
    const double total = (values.array() - values.mean()).square().mean();
    if (total <= 0.0) return 0.0;
    std::vector<double> sum(static_cast<std::size_t>(bins), 0.0), sq(sum), count(sum);
    for (Index i = 0; i < values.size(); ++i) {
        Index b = hi > lo ? static_cast<Index>((key(i) - lo) / (hi - lo) * static_cast<double>(bins)) : 0;
        b = std::clamp<Index>(b, 0, bins - 1);
        const auto s = static_cast<std::size_t>(b);
        sum[s] += values(i);
        sq[s] += values(i) * values(i);
        count[s] += 1.0;
    }
    double acc = 0.0;
    Index used = 0;
    for (std::size_t s = 0; s < sum.size(); ++s) {
        if (count[s] == 0.0) continue;
        const double mean = sum[s] / count[s];
        acc += std::max(0.0, sq[s] / count[s] - mean * mean);
        ++used;
    }
    return acc / static_cast<double>(used) / total;
}

double radius_spread(const Matrix& points) {
    if (points.cols() != 2) throw UsageError("radius spread expects two columns");
    if (points.rows() < 2) throw UsageError("radius spread needs at least two points");
    const Eigen::RowVector2d centroid = points.colwise().mean();
    const Vector radius = (points.rowwise() - centroid).rowwise().norm();
    const double mean = radius.mean();
    if (mean <= 0.0) return 0.0;
    const double var = (radius.array() - mean).square().mean();
    return std::sqrt(var) / mean;
}

}  // namespace jsmooth
