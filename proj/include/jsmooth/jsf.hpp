#pragma once

#include "jsmooth/dataset.hpp"
#include "jsmooth/kernels.hpp"
#include "jsmooth/spectral.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace jsmooth {

/// SVD of W = [A B] for A, B with orthonormal columns, built from the small
/// SVD A^T B = Q Gamma R^T instead of decomposing W itself:
///
///   V = 1/sqrt(2) [Q Q; R -R],  Sigma^2 = diag(I + Gamma, I - Gamma),  U = W V Sigma^+.
///
/// Columns are ordered by descending sigma. Columns whose sigma is at or below
/// 1e-12 * sigma_1 are treated as null and omitted from u, sigma and v.
struct ConstructiveSvd {
    Matrix u;      // N x r
    Vector sigma;  // r
    Matrix v;      // 2d x r
    Vector gamma;  // d, cosines of the principal angles, non-increasing
    Matrix q;      // d x d
    Matrix r;      // d x d
};

/// `max_columns` < 0 keeps every non-null column.
ConstructiveSvd constructive_svd(const Matrix& a, const Matrix& b, Index max_columns = -1);

/// Jointly smooth functions and everything needed to threshold and extend them.
struct JsfModel {
    Matrix functions;                  // N x M_max, orthonormal columns
    Vector singular_values;            // M_max, non-increasing
    std::vector<Vector> scores;        // per view: |W_k^T u_i|^2
    std::vector<Matrix> coefficients;  // per view: W_k^T U (d x M_max)
    Index basis_dimension = 0;         // common d after truncation
    Index selected = 0;                // M
    double threshold = std::numeric_limits<double>::quiet_NaN();

    Index n() const noexcept { return functions.rows(); }
    Index views() const noexcept { return static_cast<Index>(scores.size()); }
    Index max_functions() const noexcept { return functions.cols(); }

    /// Per-column minimum of the view scores.
    Vector min_scores() const;
};

/// min(K d, 512); for two views this is min(2d, 512).
Index default_max_functions(Index views, Index d);

/// Two-view jointly smooth functions via constructive_svd. Bases with
/// different d are truncated to the smaller one (with a warning).
JsfModel jsf_two_view(const SpectralBasis& x, const SpectralBasis& y, Index max_functions = 0);

/// K-view jointly smooth functions: dominant left singular vectors of
/// [W_1 ... W_K]. K == 2 delegates to jsf_two_view.
JsfModel jsf_multi_view(const std::vector<SpectralBasis>& bases, Index max_functions = 0,
                        const EigenOptions& options = {});

/// Closed-form threshold for independent views:
/// 1/2 + sqrt(d - 1/2) sqrt(N - d - 1/2) / (N - 1).
double analytic_threshold(Index n, Index d);

using Permutation = std::vector<Index>;

struct JackstrawResult {
    double threshold = 0.0;              // (1 + max_t gamma2_t) / 2
    std::vector<double> second_cosines;  // gamma2 per trial
};

/// Permutation threshold: each trial misaligns the y rows, rebuilds the y
/// kernel and basis, and records the second principal cosine against x.
JackstrawResult jackstraw_threshold(const SpectralBasis& x, const Dataset& y, const KernelParams& params,
                                    const std::vector<Permutation>& permutations,
                                    const EigenOptions& options = {});

JackstrawResult jackstraw_threshold(const SpectralBasis& x, const Dataset& y, const KernelParams& params,
                                    int permutations = 5, std::uint64_t seed = 0,
                                    const EigenOptions& options = {});

/// Same statistic without re-solving the eigenproblem: the eigenbasis of a
/// row-permuted kernel is the row-permuted eigenbasis, so the trial subspace
/// is span(P W_y).
JackstrawResult jackstraw_threshold(const SpectralBasis& x, const SpectralBasis& y,
                                    const std::vector<Permutation>& permutations);

JackstrawResult jackstraw_threshold(const SpectralBasis& x, const SpectralBasis& y, int permutations = 5,
                                    std::uint64_t seed = 0);

std::vector<Permutation> seeded_permutations(Index n, int count, std::uint64_t seed);

/// Length of the leading run of columns whose minimum view score exceeds
/// `threshold`; stores M and the threshold in the model.
Index select_m(JsfModel& model, double threshold);

}  // namespace jsmooth
