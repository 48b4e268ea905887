#include "jsmooth/jsmooth.h"

#include "jsmooth/embed.hpp"
#include "jsmooth/error.hpp"
#include "jsmooth/extension.hpp"
#include "jsmooth/jsf.hpp"
#include "jsmooth/metrics.hpp"
#include "jsmooth/preprocess.hpp"
#include "jsmooth/serialize.hpp"
#include "jsmooth/synthetic.hpp"

#include <omp.h>

#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>

using namespace jsmooth;

struct jsm_matrix {
    Matrix m;
};
struct jsm_dataset {
    Dataset d;
};
struct jsm_kernel {
    KernelMatrix k;
};
struct jsm_basis {
    SpectralBasis b;
};
struct jsm_model {
    ModelBundle bundle;
    std::string summary;
};
struct jsm_extender {
    ExtensionModel e;
    std::vector<Index> offsets;  // start of each view in a concatenated row, plus total
};
struct jsm_embedding {
    DiffusionEmbedding e;
};
struct jsm_pca {
    PcaMap p;
};

namespace {

thread_local std::string g_last_error;

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename F>
jsm_status guard(F&& body) noexcept {
    try {
        body();
        return JSM_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return static_cast<jsm_status>(e.kind());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
    } catch (const std::exception& e) {
        try {
            g_last_error = std::string("internal error: ") + e.what();
        } catch (...) {
        }
    } catch (...) {
        g_last_error = "internal error: unknown exception";
    }
    return JSM_ERR_INTERNAL;
}

template <typename T>
void need(const T* ptr, const char* what) {
    if (ptr == nullptr) throw UsageError(std::string(what) + " must not be NULL");
}

Index as_index(size_t v) {
    if (v > static_cast<size_t>(std::numeric_limits<Index>::max())) throw UsageError("size out of range");
    return static_cast<Index>(v);
}

jsm_matrix* wrap(Matrix m) { return new jsm_matrix{std::move(m)}; }

void copy_out(const Vector& v, double* out) {
    need(out, "output buffer");
    std::memcpy(out, v.data(), static_cast<size_t>(v.size()) * sizeof(double));
}

KernelParams to_core(const jsm_kernel_params& p) {
    KernelParams k;
    if (p.kind != JSM_KERNEL_GAUSSIAN && p.kind != JSM_KERNEL_KNN) throw UsageError("unknown kernel kind");
    k.kind = p.kind == JSM_KERNEL_KNN ? KernelKind::KnnContinuous : KernelKind::Gaussian;
    k.bandwidth = p.bandwidth;
    k.bandwidth_factor = p.bandwidth_factor;
    k.k = as_index(p.k);
    k.delta = p.delta;
    k.median_cap = as_index(p.median_cap);
    k.seed = p.seed;
    return k;
}

void from_core(const KernelParams& k, jsm_kernel_params* out) {
    if (out == nullptr) return;
    out->kind = k.kind == KernelKind::KnnContinuous ? JSM_KERNEL_KNN : JSM_KERNEL_GAUSSIAN;
    out->bandwidth = k.bandwidth;
    out->bandwidth_factor = k.bandwidth_factor;
    out->k = static_cast<size_t>(k.k);
    out->delta = k.delta;
    out->median_cap = static_cast<size_t>(k.median_cap);
    out->seed = k.seed;
}

EigenOptions to_core(const jsm_eigen_options* o) {
    EigenOptions e;
    if (o == nullptr) return e;
    switch (o->method) {
        case JSM_EIGEN_AUTO: e.method = EigenMethod::Auto; break;
        case JSM_EIGEN_LANCZOS: e.method = EigenMethod::Lanczos; break;
        case JSM_EIGEN_DENSE: e.method = EigenMethod::Dense; break;
        default: throw UsageError("unknown eigensolver method");
    }
    e.tol = o->tol;
    e.max_restarts = o->max_restarts;
    e.subspace = as_index(o->subspace);
    e.seed = o->seed;
    return e;
}

synthetic::IntegratorOptions to_core(const jsm_integrator_options* o) {
    synthetic::IntegratorOptions s;
    if (o == nullptr) return s;
    s.dt = o->dt;
    s.t_max = o->t_max;
    s.tol = o->tol;
    s.x0 = {o->x0[0], o->x0[1]};
    return s;
}

Vector column_vector(const double* data, size_t n) {
    need(data, "input array");
    return Eigen::Map<const Vector>(data, as_index(n));
}

std::atomic<jsm_warning_fn> g_warning_fn{nullptr};

void warning_trampoline(const std::string& message) {
    if (jsm_warning_fn fn = g_warning_fn.load()) fn(message.c_str());
}

}  // namespace

extern "C" {

const char* jsm_last_error(void) { return g_last_error.c_str(); }

const char* jsm_version(void) { return "1.0.0"; }

const char* jsm_status_name(jsm_status status) {
    switch (status) {
        case JSM_OK: return "ok";
        case JSM_ERR_USAGE: return "usage error";
        case JSM_ERR_DATA: return "data error";
        case JSM_ERR_NUMERICAL: return "numerical error";
        case JSM_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

void jsm_set_warning_callback(jsm_warning_fn fn) {
    g_warning_fn.store(fn);
    set_warning_sink(fn ? &warning_trampoline : nullptr);
}

void jsm_set_num_threads(int threads) {
    if (threads >= 1) omp_set_num_threads(threads);
}

// ---------------------------------------------------------------------------
// Matrices

jsm_status jsm_matrix_create(size_t rows, size_t cols, const double* data, jsm_matrix** out) {
    return guard([&] {
        need(out, "out");
        Matrix m = Matrix::Zero(as_index(rows), as_index(cols));
        if (data != nullptr) m = Eigen::Map<const RowMajor>(data, as_index(rows), as_index(cols));
        *out = wrap(std::move(m));
    });
}

jsm_status jsm_matrix_read_csv(const char* path, jsm_matrix** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = wrap(read_csv_matrix(path));
    });
}

jsm_status jsm_matrix_write_csv(const jsm_matrix* m, const char* path) {
    return guard([&] {
        need(m, "matrix");
        need(path, "path");
        write_csv_matrix(path, m->m);
    });
}

size_t jsm_matrix_rows(const jsm_matrix* m) { return m ? static_cast<size_t>(m->m.rows()) : 0; }
size_t jsm_matrix_cols(const jsm_matrix* m) { return m ? static_cast<size_t>(m->m.cols()) : 0; }

double jsm_matrix_get(const jsm_matrix* m, size_t row, size_t col) {
    if (m == nullptr || row >= jsm_matrix_rows(m) || col >= jsm_matrix_cols(m))
        return std::numeric_limits<double>::quiet_NaN();
    return m->m(static_cast<Index>(row), static_cast<Index>(col));
}

jsm_status jsm_matrix_set(jsm_matrix* m, size_t row, size_t col, double value) {
    return guard([&] {
        need(m, "matrix");
        if (row >= jsm_matrix_rows(m) || col >= jsm_matrix_cols(m)) throw UsageError("matrix index out of range");
        m->m(static_cast<Index>(row), static_cast<Index>(col)) = value;
    });
}

jsm_status jsm_matrix_copy(const jsm_matrix* m, double* out) {
    return guard([&] {
        need(m, "matrix");
        need(out, "out");
        Eigen::Map<RowMajor>(out, m->m.rows(), m->m.cols()) = m->m;
    });
}

jsm_status jsm_matrix_columns(const jsm_matrix* m, size_t first, size_t count, jsm_matrix** out) {
    return guard([&] {
        need(m, "matrix");
        need(out, "out");
        if (first + count > jsm_matrix_cols(m) || first + count < first)
            throw UsageError("column range exceeds the matrix width");
        *out = wrap(m->m.middleCols(as_index(first), as_index(count)));
    });
}

jsm_status jsm_matrix_hstack(const jsm_matrix* const* parts, size_t count, jsm_matrix** out) {
    return guard([&] {
        need(parts, "parts");
        need(out, "out");
        if (count == 0) throw UsageError("nothing to concatenate");
        Index rows = -1, cols = 0;
        for (size_t i = 0; i < count; ++i) {
            need(parts[i], "matrix");
            if (rows >= 0 && parts[i]->m.rows() != rows) throw DataError("matrices differ in row count");
            rows = parts[i]->m.rows();
            cols += parts[i]->m.cols();
        }
        Matrix m(rows, cols);
        Index at = 0;
        for (size_t i = 0; i < count; ++i) {
            m.middleCols(at, parts[i]->m.cols()) = parts[i]->m;
            at += parts[i]->m.cols();
        }
        *out = wrap(std::move(m));
    });
}

void jsm_matrix_free(jsm_matrix* m) { delete m; }

jsm_status jsm_parse_csv_row(const char* line, double* out, size_t capacity, size_t* count) {
    return guard([&] {
        need(line, "line");
        need(count, "count");
        std::vector<double> values;
        if (!parse_csv_row(line, values)) throw DataError("malformed CSV row");
        *count = values.size();
        if (values.size() > capacity) throw DataError("CSV row has " + std::to_string(values.size()) + " fields");
        if (!values.empty()) {
            need(out, "out");
            std::memcpy(out, values.data(), values.size() * sizeof(double));
        }
    });
}

jsm_status jsm_format_csv_row(const double* values, size_t count, char* buffer, size_t capacity, size_t* needed) {
    return guard([&] {
        need(values, "values");
        const std::string text = format_csv_row(values, as_index(count));
        if (needed != nullptr) *needed = text.size();
        if (buffer == nullptr || capacity <= text.size()) throw UsageError("buffer too small for the formatted row");
        std::memcpy(buffer, text.c_str(), text.size() + 1);
    });
}

// ---------------------------------------------------------------------------
// Datasets

jsm_status jsm_dataset_load_csv(const char* path, const char* view_id, jsm_dataset** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = new jsm_dataset{load_dataset(path, view_id ? view_id : "")};
    });
}

jsm_status jsm_dataset_from_matrix(const jsm_matrix* values, const char* view_id, jsm_dataset** out) {
    return guard([&] {
        need(values, "values");
        need(out, "out");
        *out = new jsm_dataset{Dataset(values->m, view_id ? view_id : "")};
    });
}

size_t jsm_dataset_rows(const jsm_dataset* ds) { return ds ? static_cast<size_t>(ds->d.rows()) : 0; }
size_t jsm_dataset_cols(const jsm_dataset* ds) { return ds ? static_cast<size_t>(ds->d.cols()) : 0; }
const char* jsm_dataset_view_id(const jsm_dataset* ds) { return ds ? ds->d.view_id().c_str() : ""; }

jsm_status jsm_dataset_values(const jsm_dataset* ds, jsm_matrix** out) {
    return guard([&] {
        need(ds, "dataset");
        need(out, "out");
        *out = wrap(ds->d.values());
    });
}

void jsm_dataset_free(jsm_dataset* ds) { delete ds; }

// ---------------------------------------------------------------------------
// Kernels

void jsm_kernel_params_default(jsm_kernel_params* params) {
    if (params != nullptr) from_core(KernelParams{}, params);
}

const char* jsm_kernel_kind_name(jsm_kernel_kind kind) { return kind == JSM_KERNEL_KNN ? "knn" : "gaussian"; }

jsm_status jsm_kernel_kind_parse(const char* name, jsm_kernel_kind* out) {
    return guard([&] {
        need(name, "name");
        need(out, "out");
        *out = kernel_kind_from_string(name) == KernelKind::KnnContinuous ? JSM_KERNEL_KNN : JSM_KERNEL_GAUSSIAN;
    });
}

jsm_status jsm_kernel_build(const jsm_dataset* ds, const jsm_kernel_params* params, jsm_kernel** out) {
    return guard([&] {
        need(ds, "dataset");
        need(params, "params");
        need(out, "out");
        *out = new jsm_kernel{build_kernel(ds->d, to_core(*params))};
    });
}

size_t jsm_kernel_n(const jsm_kernel* kernel) { return kernel ? static_cast<size_t>(kernel->k.n()) : 0; }
size_t jsm_kernel_nonzeros(const jsm_kernel* kernel) {
    return kernel ? static_cast<size_t>(kernel->k.nonzeros()) : 0;
}
void jsm_kernel_resolved_params(const jsm_kernel* kernel, jsm_kernel_params* out) {
    if (kernel != nullptr) from_core(kernel->k.params(), out);
}
void jsm_kernel_free(jsm_kernel* kernel) { delete kernel; }

// ---------------------------------------------------------------------------
// Bases

void jsm_eigen_options_default(jsm_eigen_options* options) {
    if (options == nullptr) return;
    const EigenOptions e;
    options->method = JSM_EIGEN_AUTO;
    options->tol = e.tol;
    options->max_restarts = e.max_restarts;
    options->subspace = static_cast<size_t>(e.subspace);
    options->seed = e.seed;
}

jsm_status jsm_basis_compute(const jsm_kernel* kernel, size_t d, const jsm_eigen_options* options, jsm_basis** out) {
    return guard([&] {
        need(kernel, "kernel");
        need(out, "out");
        *out = new jsm_basis{top_eigenbasis(kernel->k, as_index(d), to_core(options))};
    });
}

size_t jsm_basis_n(const jsm_basis* basis) { return basis ? static_cast<size_t>(basis->b.n()) : 0; }
size_t jsm_basis_d(const jsm_basis* basis) { return basis ? static_cast<size_t>(basis->b.d()) : 0; }

jsm_status jsm_basis_eigenvalues(const jsm_basis* basis, double* out) {
    return guard([&] {
        need(basis, "basis");
        copy_out(basis->b.eigenvalues, out);
    });
}

jsm_status jsm_basis_vectors(const jsm_basis* basis, jsm_matrix** out) {
    return guard([&] {
        need(basis, "basis");
        need(out, "out");
        *out = wrap(basis->b.vectors);
    });
}

void jsm_basis_params(const jsm_basis* basis, jsm_kernel_params* out) {
    if (basis != nullptr) from_core(basis->b.source, out);
}

jsm_status jsm_basis_smoothness(const jsm_basis* basis, const double* f, size_t n, double* score) {
    return guard([&] {
        need(basis, "basis");
        need(score, "score");
        *score = smoothness_score(basis->b, column_vector(f, n));
    });
}

jsm_status jsm_basis_save(const jsm_basis* basis, const char* dir) {
    return guard([&] {
        need(basis, "basis");
        need(dir, "dir");
        save_basis(dir, basis->b);
    });
}

jsm_status jsm_basis_load(const char* dir, jsm_basis** out) {
    return guard([&] {
        need(dir, "dir");
        need(out, "out");
        *out = new jsm_basis{load_basis(dir)};
    });
}

void jsm_basis_free(jsm_basis* basis) { delete basis; }

size_t jsm_default_basis_dimension(size_t n) {
    return static_cast<size_t>(default_basis_dimension(static_cast<Index>(std::min<size_t>(n, 1u << 30))));
}

// ---------------------------------------------------------------------------
// Models

jsm_status jsm_model_fit(const jsm_basis* const* bases, const char* const* view_ids, size_t views,
                         size_t max_functions, const jsm_eigen_options* options, jsm_model** out) {
    return guard([&] {
        need(bases, "bases");
        need(out, "out");
        if (views < 2) throw UsageError("jointly smooth functions need at least 2 views (got " +
                                        std::to_string(views) + ")");
        std::vector<SpectralBasis> list;
        ModelBundle bundle;
        for (size_t k = 0; k < views; ++k) {
            need(bases[k], "basis");
            list.push_back(bases[k]->b);
            bundle.kernels.push_back(bases[k]->b.source);
            const char* id = view_ids != nullptr ? view_ids[k] : nullptr;
            bundle.view_ids.push_back(id != nullptr && *id != '\0' ? id : "view" + std::to_string(k));
        }
        bundle.model = jsf_multi_view(list, as_index(max_functions), to_core(options));
        *out = new jsm_model{std::move(bundle), {}};
    });
}

size_t jsm_model_n(const jsm_model* model) { return model ? static_cast<size_t>(model->bundle.model.n()) : 0; }
size_t jsm_model_views(const jsm_model* model) {
    return model ? static_cast<size_t>(model->bundle.model.views()) : 0;
}
size_t jsm_model_basis_dimension(const jsm_model* model) {
    return model ? static_cast<size_t>(model->bundle.model.basis_dimension) : 0;
}
size_t jsm_model_max_functions(const jsm_model* model) {
    return model ? static_cast<size_t>(model->bundle.model.max_functions()) : 0;
}
size_t jsm_model_selected(const jsm_model* model) {
    return model ? static_cast<size_t>(model->bundle.model.selected) : 0;
}
double jsm_model_threshold(const jsm_model* model) {
    return model ? model->bundle.model.threshold : std::numeric_limits<double>::quiet_NaN();
}

const char* jsm_model_view_id(const jsm_model* model, size_t view) {
    if (model == nullptr || view >= model->bundle.view_ids.size()) return "";
    return model->bundle.view_ids[view].c_str();
}

void jsm_model_view_params(const jsm_model* model, size_t view, jsm_kernel_params* out) {
    if (model != nullptr && view < model->bundle.kernels.size()) from_core(model->bundle.kernels[view], out);
}

jsm_status jsm_model_singular_values(const jsm_model* model, double* out) {
    return guard([&] {
        need(model, "model");
        copy_out(model->bundle.model.singular_values, out);
    });
}

jsm_status jsm_model_scores(const jsm_model* model, size_t view, double* out) {
    return guard([&] {
        need(model, "model");
        if (view >= model->bundle.model.scores.size()) throw UsageError("view index out of range");
        copy_out(model->bundle.model.scores[view], out);
    });
}

jsm_status jsm_model_min_scores(const jsm_model* model, double* out) {
    return guard([&] {
        need(model, "model");
        copy_out(model->bundle.model.min_scores(), out);
    });
}

jsm_status jsm_model_functions(const jsm_model* model, jsm_matrix** out) {
    return guard([&] {
        need(model, "model");
        need(out, "out");
        *out = wrap(model->bundle.model.functions);
    });
}

jsm_status jsm_model_select(jsm_model* model, double threshold, const char* mode, size_t* selected) {
    return guard([&] {
        need(model, "model");
        if (!std::isfinite(threshold)) throw UsageError("threshold must be finite");
        const Index m = select_m(model->bundle.model, threshold);
        model->bundle.threshold_mode = mode ? mode : "";
        if (selected != nullptr) *selected = static_cast<size_t>(m);
    });
}

void jsm_model_set_seed(jsm_model* model, uint64_t seed) {
    if (model != nullptr) model->bundle.seed = seed;
}

jsm_status jsm_model_save(const jsm_model* model, const char* dir) {
    return guard([&] {
        need(model, "model");
        need(dir, "dir");
        save_model(dir, model->bundle);
    });
}

jsm_status jsm_model_load(const char* dir, jsm_model** out) {
    return guard([&] {
        need(dir, "dir");
        need(out, "out");
        *out = new jsm_model{load_model(dir), {}};
    });
}

const char* jsm_model_summary(jsm_model* model) {
    if (model == nullptr) return "";
    try {
        model->summary = model_summary(model->bundle);
    } catch (...) {
        model->summary.clear();
    }
    return model->summary.c_str();
}

void jsm_model_free(jsm_model* model) { delete model; }

// ---------------------------------------------------------------------------
// Thresholds

jsm_status jsm_analytic_threshold(size_t n, size_t d, double* out) {
    return guard([&] {
        need(out, "out");
        *out = analytic_threshold(as_index(n), as_index(d));
    });
}

jsm_status jsm_jackstraw_threshold(const jsm_basis* x, const jsm_basis* y, int permutations, uint64_t seed,
                                   double* threshold, double* second_cosines) {
    return guard([&] {
        need(x, "x basis");
        need(y, "y basis");
        need(threshold, "threshold");
        const JackstrawResult r = jackstraw_threshold(x->b, y->b, permutations, seed);
        *threshold = r.threshold;
        if (second_cosines != nullptr) std::copy(r.second_cosines.begin(), r.second_cosines.end(), second_cosines);
    });
}

jsm_status jsm_jackstraw_threshold_rebuild(const jsm_basis* x, const jsm_dataset* y, const jsm_kernel_params* params,
                                           int permutations, uint64_t seed, const jsm_eigen_options* options,
                                           double* threshold, double* second_cosines) {
    return guard([&] {
        need(x, "x basis");
        need(y, "y dataset");
        need(params, "params");
        need(threshold, "threshold");
        const JackstrawResult r =
            jackstraw_threshold(x->b, y->d, to_core(*params), permutations, seed, to_core(options));
        *threshold = r.threshold;
        if (second_cosines != nullptr) std::copy(r.second_cosines.begin(), r.second_cosines.end(), second_cosines);
    });
}

// ---------------------------------------------------------------------------
// Extension

namespace {
jsm_extender* wrap_extender(ExtensionModel e) {
    std::vector<Index> offsets{0};
    for (Index k = 0; k < e.views(); ++k) offsets.push_back(offsets.back() + e.view(k).train.cols());
    return new jsm_extender{std::move(e), std::move(offsets)};
}
}  // namespace

jsm_status jsm_extender_build(const jsm_model* model, const jsm_basis* const* bases,
                              const jsm_dataset* const* datasets, size_t views, double cutoff_ratio,
                              jsm_extender** out) {
    return guard([&] {
        need(model, "model");
        need(bases, "bases");
        need(datasets, "datasets");
        need(out, "out");
        std::vector<SpectralBasis> b;
        std::vector<Dataset> d;
        for (size_t k = 0; k < views; ++k) {
            need(bases[k], "basis");
            need(datasets[k], "dataset");
            b.push_back(bases[k]->b);
            d.push_back(datasets[k]->d);
        }
        *out = wrap_extender(build_extender(model->bundle.model, b, d, cutoff_ratio > 0.0 ? cutoff_ratio : 1e-8));
    });
}

size_t jsm_extender_views(const jsm_extender* ext) { return ext ? static_cast<size_t>(ext->e.views()) : 0; }
size_t jsm_extender_functions(const jsm_extender* ext) {
    return ext ? static_cast<size_t>(ext->e.functions()) : 0;
}
size_t jsm_extender_view_dim(const jsm_extender* ext, size_t view) {
    if (ext == nullptr || view >= jsm_extender_views(ext)) return 0;
    return static_cast<size_t>(ext->e.view(static_cast<Index>(view)).train.cols());
}
size_t jsm_extender_retained(const jsm_extender* ext, size_t view) {
    if (ext == nullptr || view >= jsm_extender_views(ext)) return 0;
    return ext->e.view(static_cast<Index>(view)).retained.size();
}
void jsm_extender_view_params(const jsm_extender* ext, size_t view, jsm_kernel_params* out) {
    if (ext != nullptr && view < jsm_extender_views(ext)) from_core(ext->e.view(static_cast<Index>(view)).params, out);
}

jsm_status jsm_extender_extend_row(const jsm_extender* ext, const double* row, size_t length, double* out) {
    return guard([&] {
        need(ext, "extender");
        need(row, "row");
        need(out, "out");
        if (static_cast<Index>(length) != ext->offsets.back())
            throw DataError("expected " + std::to_string(ext->offsets.back()) + " values per row, got " +
                            std::to_string(length));
        for (size_t i = 0; i < length; ++i)
            if (!std::isfinite(row[i])) throw DataError("row has non-finite values");
        std::vector<const double*> queries;
        for (Index k = 0; k < ext->e.views(); ++k) queries.push_back(row + ext->offsets[static_cast<size_t>(k)]);
        ext->e.extend_row(queries, out);
    });
}

jsm_status jsm_extender_extend(const jsm_extender* ext, const jsm_matrix* const* points, size_t views,
                               jsm_matrix** out) {
    return guard([&] {
        need(ext, "extender");
        need(points, "points");
        need(out, "out");
        std::vector<Matrix> p;
        for (size_t k = 0; k < views; ++k) {
            need(points[k], "points");
            p.push_back(points[k]->m);
        }
        *out = wrap(extend(ext->e, p));
    });
}

jsm_status jsm_extender_extend_view(const jsm_extender* ext, size_t view, const jsm_matrix* points,
                                    jsm_matrix** out) {
    return guard([&] {
        need(ext, "extender");
        need(points, "points");
        need(out, "out");
        *out = wrap(extend_view(ext->e, as_index(view), points->m));
    });
}

jsm_status jsm_extender_save(const jsm_extender* ext, const char* dir) {
    return guard([&] {
        need(ext, "extender");
        need(dir, "dir");
        save_extender(dir, ext->e);
    });
}

jsm_status jsm_extender_load(const char* dir, jsm_extender** out) {
    return guard([&] {
        need(dir, "dir");
        need(out, "out");
        *out = wrap_extender(load_extender(dir));
    });
}

void jsm_extender_free(jsm_extender* ext) { delete ext; }

// ---------------------------------------------------------------------------
// Embedding and preprocessing

jsm_status jsm_diffusion_maps(const jsm_matrix* features, size_t m, double bandwidth, jsm_embedding** out) {
    return guard([&] {
        need(features, "features");
        need(out, "out");
        *out = new jsm_embedding{diffusion_maps(features->m, as_index(m), bandwidth)};
    });
}

size_t jsm_embedding_dim(const jsm_embedding* emb) { return emb ? static_cast<size_t>(emb->e.coordinates.cols()) : 0; }
double jsm_embedding_bandwidth(const jsm_embedding* emb) { return emb ? emb->e.bandwidth : 0.0; }

jsm_status jsm_embedding_eigenvalues(const jsm_embedding* emb, double* out) {
    return guard([&] {
        need(emb, "embedding");
        copy_out(emb->e.eigenvalues, out);
    });
}

jsm_status jsm_embedding_coordinates(const jsm_embedding* emb, jsm_matrix** out) {
    return guard([&] {
        need(emb, "embedding");
        need(out, "out");
        *out = wrap(emb->e.coordinates);
    });
}

void jsm_embedding_free(jsm_embedding* emb) { delete emb; }

jsm_status jsm_pca_fit(const jsm_matrix* data, size_t q, jsm_pca** out) {
    return guard([&] {
        need(data, "data");
        need(out, "out");
        *out = new jsm_pca{pca_fit(data->m, as_index(q))};
    });
}

size_t jsm_pca_input_dim(const jsm_pca* pca) { return pca ? static_cast<size_t>(pca->p.input_dim()) : 0; }
size_t jsm_pca_output_dim(const jsm_pca* pca) { return pca ? static_cast<size_t>(pca->p.output_dim()) : 0; }

jsm_status jsm_pca_explained(const jsm_pca* pca, double* out) {
    return guard([&] {
        need(pca, "pca");
        copy_out(pca->p.explained, out);
    });
}

jsm_status jsm_pca_apply(const jsm_pca* pca, const jsm_matrix* data, jsm_matrix** out) {
    return guard([&] {
        need(pca, "pca");
        need(data, "data");
        need(out, "out");
        *out = wrap(pca_apply(pca->p, data->m));
    });
}

void jsm_pca_free(jsm_pca* pca) { delete pca; }

jsm_status jsm_delay_embed(const jsm_matrix* data, size_t horizon, jsm_matrix** out) {
    return guard([&] {
        need(data, "data");
        need(out, "out");
        *out = wrap(delay_embed(data->m, as_index(horizon)));
    });
}

// ---------------------------------------------------------------------------
// Synthetic data

namespace {
void emit_toy(const synthetic::ToySample& s, jsm_matrix** first, jsm_matrix** torus, jsm_matrix** truth) {
    Matrix t(s.truth.z.size(), 3);
    t << s.truth.z, s.truth.eps, s.truth.eta;
    *first = wrap(s.spiral.values());
    *torus = wrap(s.torus.values());
    *truth = wrap(std::move(t));
}
}  // namespace

jsm_status jsm_generate_toy(size_t n, uint64_t seed, jsm_matrix** spiral, jsm_matrix** torus, jsm_matrix** truth) {
    return guard([&] {
        need(spiral, "spiral");
        need(torus, "torus");
        need(truth, "truth");
        emit_toy(synthetic::generate_toy(as_index(n), seed), spiral, torus, truth);
    });
}

jsm_status jsm_generate_ring_toy(size_t n, uint64_t seed, jsm_matrix** ring, jsm_matrix** torus, jsm_matrix** truth) {
    return guard([&] {
        need(ring, "ring");
        need(torus, "torus");
        need(truth, "truth");
        emit_toy(synthetic::generate_ring_toy(as_index(n), seed), ring, torus, truth);
    });
}

jsm_status jsm_circle_view(const jsm_matrix* z, jsm_matrix** out) {
    return guard([&] {
        need(z, "z");
        need(out, "out");
        if (z->m.cols() != 1) throw UsageError("circle view expects a single column of z");
        *out = wrap(synthetic::circle_view(z->m.col(0)).values());
    });
}

void jsm_integrator_options_default(jsm_integrator_options* options) {
    if (options == nullptr) return;
    const synthetic::IntegratorOptions s;
    options->dt = s.dt;
    options->t_max = s.t_max;
    options->tol = s.tol;
    options->x0[0] = s.x0[0];
    options->x0[1] = s.x0[1];
}

jsm_status jsm_generate_airplane(size_t n, uint64_t seed, const jsm_integrator_options* options,
                                 jsm_matrix** parameters, jsm_matrix** steady_states, jsm_matrix** all_parameters,
                                 jsm_matrix** truth) {
    return guard([&] {
        need(parameters, "parameters");
        need(steady_states, "steady_states");
        need(truth, "truth");
        const auto s = synthetic::generate_airplane(as_index(n), seed, to_core(options));
        Matrix t(s.truth.effective.size(), 2);
        t << s.truth.effective, s.truth.p3;
        *parameters = wrap(s.parameters.values());
        *steady_states = wrap(s.steady_states.values());
        if (all_parameters != nullptr) *all_parameters = wrap(s.all_parameters);
        *truth = wrap(std::move(t));
    });
}

jsm_status jsm_airplane_steady_state(const double p[3], const jsm_integrator_options* options, double x[2]) {
    return guard([&] {
        need(p, "p");
        need(x, "x");
        const auto s = synthetic::simulate_to_steady_state({p[0], p[1], p[2]}, to_core(options));
        x[0] = s.x[0];
        x[1] = s.x[1];
    });
}

void jsm_airplane_closed_form(const double p[3], double x[2]) {
    if (p == nullptr || x == nullptr) return;
    const auto s = synthetic::steady_state_closed_form({p[0], p[1], p[2]});
    x[0] = s[0];
    x[1] = s[1];
}

// ---------------------------------------------------------------------------
// Metrics

jsm_status jsm_distance_correlation(const double* a, const double* b, size_t n, double* out) {
    return guard([&] {
        need(out, "out");
        *out = distance_correlation(column_vector(a, n), column_vector(b, n));
    });
}

jsm_status jsm_relative_rmse(const double* estimate, const double* reference, size_t n, double* out) {
    return guard([&] {
        need(out, "out");
        *out = relative_rmse(column_vector(estimate, n), column_vector(reference, n));
    });
}

jsm_status jsm_conditional_variance_ratio(const double* values, const double* key, size_t n, size_t bins,
                                          double* out) {
    return guard([&] {
        need(out, "out");
        *out = conditional_variance_ratio(column_vector(values, n), column_vector(key, n), as_index(bins));
    });
}

jsm_status jsm_radius_spread(const jsm_matrix* points, double* out) {
    return guard([&] {
        need(points, "points");
        need(out, "out");
        *out = radius_spread(points->m);
    });
}

}  // extern "C"
