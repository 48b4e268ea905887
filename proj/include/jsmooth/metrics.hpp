#pragma once

#include "jsmooth/dataset.hpp"

namespace jsmooth {

/// Sample distance correlation (Szekely-Rizzo-Bakirov) between two
/// equal-length scalar samples. O(N^2) time, O(N) memory. Returns 0 when
/// either sample is constant.
double distance_correlation(const Vector& a, const Vector& b);

/// Pearson correlation; 0 when either sample is constant.
double pearson(const Vector& a, const Vector& b);

/// Spearman rank correlation (average ranks for ties).
double spearman(const Vector& a, const Vector& b);

/// |estimate - reference|_2 / |reference|_2.
double relative_rmse(const Vector& estimate, const Vector& reference);

/// Mean over `bins` equal-width bins of `key` (over its observed range) of the
/// within-bin variance of `values`, divided by the total variance of `values`.
/// Empty bins are skipped.
double conditional_variance_ratio(const Vector& values, const Vector& key, Index bins = 20);

/// Fraction-of-mean spread of the point radii |row| about the centroid:
/// std(radius) / mean(radius). Expects two columns.
double radius_spread(const Matrix& points);

}  // namespace jsmooth
