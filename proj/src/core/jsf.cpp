#include "jsmooth/jsf.hpp"

#include "jsmooth/error.hpp"
#include "jsmooth/linalg.hpp"
#include "jsmooth/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace jsmooth {

namespace {

constexpr double kNullSigma = 1e-12;

void check_orthonormal_shapes(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        throw UsageError("views disagree on N (" + std::to_string(a.rows()) + " vs " + std::to_string(b.rows()) + ")");
    if (a.cols() != b.cols()) throw UsageError("constructive SVD needs equal d for both views");
    if (a.cols() < 1) throw UsageError("basis dimension d must be positive");
}

// Flip u_i (and the matching column of v) so its largest-magnitude entry is positive.
void canonicalize_pairs(Matrix& u, Matrix& v) {
    for (Index j = 0; j < u.cols(); ++j) {
        Index at = 0;
        u.col(j).cwiseAbs().maxCoeff(&at);
        if (u(at, j) < 0.0) {
            u.col(j) *= -1.0;
            v.col(j) *= -1.0;
        }
    }
}

JsfModel finish_model(Matrix functions, Vector sigma, const std::vector<const Matrix*>& bases) {
    JsfModel model;
    model.basis_dimension = bases.front()->cols();
    for (const Matrix* w : bases) {
        Matrix alpha = w->transpose() * functions;
        model.scores.push_back(alpha.colwise().squaredNorm().transpose());
        model.coefficients.push_back(std::move(alpha));
    }
    model.functions = std::move(functions);
    model.singular_values = std::move(sigma);
    return model;
}

}  // namespace

ConstructiveSvd constructive_svd(const Matrix& a, const Matrix& b, Index max_columns) {
    check_orthonormal_shapes(a, b);
    const Index n = a.rows();
    const Index d = a.cols();
    const Index total = 2 * d;
    const Index wanted = max_columns < 0 ? total : std::min(max_columns, total);

    ConstructiveSvd out;
    Svd small = thin_svd(a.transpose() * b);
    out.gamma = small.values.cwiseMin(1.0);
    out.q = std::move(small.u);
    out.r = std::move(small.v);

    const Matrix aq = a * out.q;
    const Matrix br = b * out.r;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    // Candidate columns: (block, index, sigma). The I + Gamma block always
    // dominates the I - Gamma block.
    struct Column {
        bool plus;
        Index i;
        double sigma;
    };
    std::vector<Column> columns;
    columns.reserve(static_cast<std::size_t>(total));
    for (Index i = 0; i < d; ++i) columns.push_back({true, i, std::sqrt(1.0 + out.gamma(i))});

    if (wanted > d) {
        // sigma^2 = 1 - gamma loses all precision near gamma = 1; evaluate the
        // same quantity as the norm of W v instead.
        std::vector<Column> minus;
        minus.reserve(static_cast<std::size_t>(d));
        for (Index i = 0; i < d; ++i) minus.push_back({false, i, ((aq.col(i) - br.col(i)) * inv_sqrt2).norm()});
        std::stable_sort(minus.begin(), minus.end(), [](const Column& l, const Column& r) { return l.sigma > r.sigma; });
        columns.insert(columns.end(), minus.begin(), minus.end());
    }

    const double cutoff = kNullSigma * columns.front().sigma;
    std::vector<Column> kept;
    for (const Column& c : columns) {
        if (static_cast<Index>(kept.size()) == wanted) break;
        if (c.sigma > cutoff) kept.push_back(c);
    }

    const auto r = static_cast<Index>(kept.size());
    out.u.resize(n, r);
    out.sigma.resize(r);
    out.v = Matrix::Zero(total, r);
    for (Index j = 0; j < r; ++j) {
        const Column& c = kept[static_cast<std::size_t>(j)];
        const double sign = c.plus ? 1.0 : -1.0;
        out.sigma(j) = c.sigma;
        out.u.col(j) = (aq.col(c.i) + sign * br.col(c.i)) * (inv_sqrt2 / c.sigma);
        out.v.col(j).head(d) = out.q.col(c.i) * inv_sqrt2;
        out.v.col(j).tail(d) = out.r.col(c.i) * (sign * inv_sqrt2);
    }
    canonicalize_pairs(out.u, out.v);
    return out;
}

// ---------------------------------------------------------------------------

Vector JsfModel::min_scores() const {
    if (scores.empty()) return Vector();
    Vector m = scores.front();
    for (const Vector& s : scores) m = m.cwiseMin(s);
    return m;
}

Index default_max_functions(Index views, Index d) { return std::min<Index>(views * d, 512); }

JsfModel jsf_two_view(const SpectralBasis& x, const SpectralBasis& y, Index max_functions) {
    if (x.n() != y.n())
        throw DataError("views disagree on N (" + std::to_string(x.n()) + " vs " + std::to_string(y.n()) + ")");
    if (x.d() < 1 || y.d() < 1) throw UsageError("basis dimension d must be positive");
    const Index d = std::min(x.d(), y.d());
    if (x.d() != y.d())
        warn("views have different basis dimensions (" + std::to_string(x.d()) + " vs " + std::to_string(y.d()) +
             "); truncating both to d=" + std::to_string(d));
    const Matrix wx = x.vectors.leftCols(d);
    const Matrix wy = y.vectors.leftCols(d);
    const Index m_max = max_functions > 0 ? max_functions : default_max_functions(2, d);

    ConstructiveSvd svd = constructive_svd(wx, wy, m_max);
    return finish_model(std::move(svd.u), std::move(svd.sigma), {&wx, &wy});
}

JsfModel jsf_multi_view(const std::vector<SpectralBasis>& bases, Index max_functions, const EigenOptions& options) {
    const auto k = static_cast<Index>(bases.size());
    if (k < 2) throw UsageError("jointly smooth functions need at least 2 views");
    for (const auto& b : bases)
        if (b.n() != bases.front().n())
            throw DataError("views disagree on N (" + std::to_string(bases.front().n()) + " vs " +
                            std::to_string(b.n()) + ")");
    if (k == 2) return jsf_two_view(bases[0], bases[1], max_functions);

    Index d = bases.front().d();
    for (const auto& b : bases) d = std::min(d, b.d());
    if (d < 1) throw UsageError("basis dimension d must be positive");
    for (const auto& b : bases)
        if (b.d() != d) {
            warn("views have different basis dimensions; truncating all to d=" + std::to_string(d));
            break;
        }

    const Index n = bases.front().n();
    const Index cols = k * d;
    Matrix w(n, cols);
    for (Index v = 0; v < k; ++v) w.middleCols(v * d, d) = bases[static_cast<std::size_t>(v)].vectors.leftCols(d);

    const Index m_max = std::min(max_functions > 0 ? max_functions : default_max_functions(k, d), std::min(n, cols));

    // Right singular vectors from the Kd x Kd Gram matrix; W is never
    // decomposed densely.
    EigenPairs gram;
    EigenMethod method = options.method;
    if (method == EigenMethod::Auto) method = (5 * m_max >= cols || cols <= 300) ? EigenMethod::Dense : EigenMethod::Lanczos;
    if (m_max >= cols) method = EigenMethod::Dense;
    if (method == EigenMethod::Dense) {
        const Matrix g = w.transpose() * w;
        if (m_max < cols) {
            gram = dense_largest(g, m_max);
        } else {
            Eigen::SelfAdjointEigenSolver<Matrix> es(g);
            gram.values = es.eigenvalues().reverse();
            gram.vectors = es.eigenvectors().rowwise().reverse();
        }
    } else {
        SymmetricOperator op{cols, [&w](const Vector& x, Vector& y) {
                                 const Vector t = w * x;
                                 y.noalias() = w.transpose() * t;
                             }};
        gram = lanczos_largest(op, m_max, options);
    }

    // The Gram route resolves sigma only to about sqrt(eps) * sigma_1.
    const Vector sigma_all = gram.values.cwiseMax(0.0).cwiseSqrt();
    const double cutoff = 1e-6 * sigma_all(0);
    Index r = 0;
    while (r < sigma_all.size() && sigma_all(r) > cutoff) ++r;

    Matrix u = w * gram.vectors.leftCols(r);
    for (Index j = 0; j < r; ++j) u.col(j) /= sigma_all(j);
    Matrix v = gram.vectors.leftCols(r);
    canonicalize_pairs(u, v);

    std::vector<Matrix> truncated;
    truncated.reserve(static_cast<std::size_t>(k));
    for (const auto& b : bases) truncated.push_back(b.vectors.leftCols(d));
    std::vector<const Matrix*> ptrs;
    for (const auto& t : truncated) ptrs.push_back(&t);
    return finish_model(std::move(u), sigma_all.head(r), ptrs);
}

// ---------------------------------------------------------------------------

double analytic_threshold(Index n, Index d) {
    if (d < 1 || d >= n)
        throw UsageError("analytic threshold needs 1 <= d < N (d=" + std::to_string(d) + ", N=" + std::to_string(n) + ")");
    const auto nn = static_cast<double>(n);
    const auto dd = static_cast<double>(d);
    return 0.5 + std::sqrt(dd - 0.5) * std::sqrt(nn - dd - 0.5) / (nn - 1.0);
}

std::vector<Permutation> seeded_permutations(Index n, int count, std::uint64_t seed) {
    if (count < 1) throw UsageError("jackstraw needs at least one permutation");
    Rng rng(seed);
    std::vector<Permutation> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) out.push_back(rng.permutation(n));
    return out;
}

namespace {

void check_jackstraw(const SpectralBasis& x, Index n_y, const std::vector<Permutation>& permutations) {
    if (x.n() < 4) throw UsageError("jackstraw threshold needs N >= 4");
    if (n_y != x.n()) throw DataError("views disagree on N (" + std::to_string(x.n()) + " vs " + std::to_string(n_y) + ")");
    if (x.d() < 2) throw UsageError("jackstraw threshold needs d >= 2");
    if (permutations.empty()) throw UsageError("jackstraw needs at least one permutation");
    for (const auto& p : permutations) {
        if (static_cast<Index>(p.size()) != x.n()) throw UsageError("permutation length does not match N");
        std::vector<char> seen(p.size(), 0);
        for (Index i : p) {
            if (i < 0 || i >= x.n() || seen[static_cast<std::size_t>(i)]) throw UsageError("invalid permutation");
            seen[static_cast<std::size_t>(i)] = 1;
        }
    }
}

double second_cosine(const Matrix& wx, const Matrix& wy_permuted) {
    const Vector cosines = principal_cosines(wx, wy_permuted);
    return cosines(1);
}

JackstrawResult aggregate(std::vector<double> second) {
    JackstrawResult out;
    out.second_cosines = std::move(second);
    out.threshold = 0.5 * (1.0 + *std::max_element(out.second_cosines.begin(), out.second_cosines.end()));
    return out;
}

}  // namespace

JackstrawResult jackstraw_threshold(const SpectralBasis& x, const Dataset& y, const KernelParams& params,
                                    const std::vector<Permutation>& permutations, const EigenOptions& options) {
    check_jackstraw(x, y.rows(), permutations);
    // Permuting rows leaves the pairwise-distance median unchanged, so an
    // automatic bandwidth is resolved once.
    const KernelParams resolved = resolve_params(y, params);
    std::vector<double> second;
    for (const auto& p : permutations) {
        const Dataset shuffled = y.select_rows(p);
        const SpectralBasis wy = top_eigenbasis(build_kernel(shuffled, resolved), x.d(), options);
        second.push_back(second_cosine(x.vectors, wy.vectors));
    }
    return aggregate(std::move(second));
}

JackstrawResult jackstraw_threshold(const SpectralBasis& x, const Dataset& y, const KernelParams& params,
                                    int permutations, std::uint64_t seed, const EigenOptions& options) {
    return jackstraw_threshold(x, y, params, seeded_permutations(y.rows(), permutations, seed), options);
}

JackstrawResult jackstraw_threshold(const SpectralBasis& x, const SpectralBasis& y,
                                    const std::vector<Permutation>& permutations) {
    check_jackstraw(x, y.n(), permutations);
    const Index d = std::min(x.d(), y.d());
    const Matrix wx = x.vectors.leftCols(d);
    std::vector<double> second;
    Matrix shuffled(y.n(), d);
    for (const auto& p : permutations) {
        for (Index i = 0; i < y.n(); ++i) shuffled.row(i) = y.vectors.row(p[static_cast<std::size_t>(i)]).head(d);
        second.push_back(second_cosine(wx, shuffled));
    }
    return aggregate(std::move(second));
}

JackstrawResult jackstraw_threshold(const SpectralBasis& x, const SpectralBasis& y, int permutations,
                                    std::uint64_t seed) {
    return jackstraw_threshold(x, y, seeded_permutations(y.n(), permutations, seed));
}

Index select_m(JsfModel& model, double threshold) {
    if (!(threshold > 0.5 && threshold <= 1.0)) throw UsageError("threshold E0 must lie in (1/2, 1]");
    const Vector scores = model.min_scores();
    Index m = 0;
    while (m < scores.size() && scores(m) > threshold) ++m;
    model.selected = m;
    model.threshold = threshold;
    return m;
}

}  // namespace jsmooth
