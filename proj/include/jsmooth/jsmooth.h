/* C interface to the jointly-smooth-functions library.
 *
 * Every object is an opaque handle released with its *_free function
 * (passing NULL is a no-op). Every fallible call returns a jsm_status; on
 * failure the message is available from jsm_last_error() on the same thread
 * until the next failing call. Matrices cross the boundary row-major.
 */
#ifndef JSMOOTH_H
#define JSMOOTH_H

#include <stddef.h>
#include <stdint.h>

#if defined(JSM_BUILDING)
#define JSM_API __attribute__((visibility("default")))
#else
#define JSM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum jsm_status {
    JSM_OK = 0,
    JSM_ERR_USAGE = 1,     /* bad argument or violated precondition */
    JSM_ERR_DATA = 2,      /* malformed or inconsistent data, I/O failure */
    JSM_ERR_NUMERICAL = 3, /* solver failure, degenerate numerics */
    JSM_ERR_INTERNAL = 4   /* allocation failure or unexpected exception */
} jsm_status;

JSM_API const char* jsm_last_error(void);
JSM_API const char* jsm_version(void);
JSM_API const char* jsm_status_name(jsm_status status);

/* Warnings (non-positive eigenvalues, truncated d, ...) go to stderr unless a
 * callback is installed. NULL restores stderr. Process-wide. */
typedef void (*jsm_warning_fn)(const char* message);
JSM_API void jsm_set_warning_callback(jsm_warning_fn fn);

/* Caps OpenMP threads; values < 1 leave the runtime default. */
JSM_API void jsm_set_num_threads(int threads);

/* ------------------------------------------------------------------------
 * Matrices
 * ------------------------------------------------------------------------ */

typedef struct jsm_matrix jsm_matrix;

/* `data` may be NULL for a zero matrix. */
JSM_API jsm_status jsm_matrix_create(size_t rows, size_t cols, const double* data, jsm_matrix** out);
JSM_API jsm_status jsm_matrix_read_csv(const char* path, jsm_matrix** out);
/* 17 significant digits, one row per line. */
JSM_API jsm_status jsm_matrix_write_csv(const jsm_matrix* m, const char* path);
JSM_API size_t jsm_matrix_rows(const jsm_matrix* m);
JSM_API size_t jsm_matrix_cols(const jsm_matrix* m);
JSM_API double jsm_matrix_get(const jsm_matrix* m, size_t row, size_t col);
JSM_API jsm_status jsm_matrix_set(jsm_matrix* m, size_t row, size_t col, double value);
/* Copies rows*cols values into `out`, row-major. */
JSM_API jsm_status jsm_matrix_copy(const jsm_matrix* m, double* out);
/* Columns [first, first + count). */
JSM_API jsm_status jsm_matrix_columns(const jsm_matrix* m, size_t first, size_t count, jsm_matrix** out);
/* Side-by-side concatenation of `count` matrices with equal row counts. */
JSM_API jsm_status jsm_matrix_hstack(const jsm_matrix* const* parts, size_t count, jsm_matrix** out);
JSM_API void jsm_matrix_free(jsm_matrix* m);

/* Parses one CSV line; *count receives the number of fields. Returns
 * JSM_ERR_DATA on malformed input or when more than `capacity` fields. */
JSM_API jsm_status jsm_parse_csv_row(const char* line, double* out, size_t capacity, size_t* count);
/* Formats `count` values with 17 significant digits into `buffer`. *needed
 * receives the length without the terminator; the call fails with
 * JSM_ERR_USAGE when the buffer is too small. */
JSM_API jsm_status jsm_format_csv_row(const double* values, size_t count, char* buffer, size_t capacity,
                                      size_t* needed);

/* ------------------------------------------------------------------------
 * Datasets
 * ------------------------------------------------------------------------ */

typedef struct jsm_dataset jsm_dataset;

JSM_API jsm_status jsm_dataset_load_csv(const char* path, const char* view_id, jsm_dataset** out);
JSM_API jsm_status jsm_dataset_from_matrix(const jsm_matrix* values, const char* view_id, jsm_dataset** out);
JSM_API size_t jsm_dataset_rows(const jsm_dataset* ds);
JSM_API size_t jsm_dataset_cols(const jsm_dataset* ds);
JSM_API const char* jsm_dataset_view_id(const jsm_dataset* ds);
JSM_API jsm_status jsm_dataset_values(const jsm_dataset* ds, jsm_matrix** out);
JSM_API void jsm_dataset_free(jsm_dataset* ds);

/* ------------------------------------------------------------------------
 * Kernels
 * ------------------------------------------------------------------------ */

typedef enum jsm_kernel_kind { JSM_KERNEL_GAUSSIAN = 0, JSM_KERNEL_KNN = 1 } jsm_kernel_kind;

typedef struct jsm_kernel_params {
    jsm_kernel_kind kind;
    double bandwidth;        /* Gaussian sigma; <= 0 selects factor x median distance */
    double bandwidth_factor; /* default 0.3 */
    size_t k;                /* k-NN neighbors, default 25 */
    double delta;            /* k-NN scale, default 1.0 */
    size_t median_cap;       /* rows used for the median estimate, default 5000 */
    uint64_t seed;           /* median subsample seed */
} jsm_kernel_params;

JSM_API void jsm_kernel_params_default(jsm_kernel_params* params);
JSM_API const char* jsm_kernel_kind_name(jsm_kernel_kind kind);
JSM_API jsm_status jsm_kernel_kind_parse(const char* name, jsm_kernel_kind* out);

typedef struct jsm_kernel jsm_kernel;

JSM_API jsm_status jsm_kernel_build(const jsm_dataset* ds, const jsm_kernel_params* params, jsm_kernel** out);
JSM_API size_t jsm_kernel_n(const jsm_kernel* kernel);
JSM_API size_t jsm_kernel_nonzeros(const jsm_kernel* kernel);
/* Parameters with the automatic bandwidth resolved. */
JSM_API void jsm_kernel_resolved_params(const jsm_kernel* kernel, jsm_kernel_params* out);
JSM_API void jsm_kernel_free(jsm_kernel* kernel);

/* ------------------------------------------------------------------------
 * Spectral bases
 * ------------------------------------------------------------------------ */

typedef enum jsm_eigen_method {
    JSM_EIGEN_AUTO = 0,
    JSM_EIGEN_LANCZOS = 1,
    JSM_EIGEN_DENSE = 2
} jsm_eigen_method;

typedef struct jsm_eigen_options {
    jsm_eigen_method method;
    double tol;       /* default 1e-12 */
    int max_restarts; /* default 1000 */
    size_t subspace;  /* 0 = automatic */
    uint64_t seed;
} jsm_eigen_options;

JSM_API void jsm_eigen_options_default(jsm_eigen_options* options);

typedef struct jsm_basis jsm_basis;

/* `options` may be NULL for defaults. */
JSM_API jsm_status jsm_basis_compute(const jsm_kernel* kernel, size_t d, const jsm_eigen_options* options,
                                     jsm_basis** out);
JSM_API size_t jsm_basis_n(const jsm_basis* basis);
JSM_API size_t jsm_basis_d(const jsm_basis* basis);
/* d values, non-increasing. */
JSM_API jsm_status jsm_basis_eigenvalues(const jsm_basis* basis, double* out);
JSM_API jsm_status jsm_basis_vectors(const jsm_basis* basis, jsm_matrix** out);
JSM_API void jsm_basis_params(const jsm_basis* basis, jsm_kernel_params* out);
JSM_API jsm_status jsm_basis_smoothness(const jsm_basis* basis, const double* f, size_t n, double* score);
JSM_API jsm_status jsm_basis_save(const jsm_basis* basis, const char* dir);
JSM_API jsm_status jsm_basis_load(const char* dir, jsm_basis** out);
JSM_API void jsm_basis_free(jsm_basis* basis);

/* N/4 capped at 2000. */
JSM_API size_t jsm_default_basis_dimension(size_t n);

/* ------------------------------------------------------------------------
 * Jointly smooth functions
 * ------------------------------------------------------------------------ */

typedef struct jsm_model jsm_model;

/* K >= 2 bases over the same N rows. `view_ids` may be NULL. max_functions 0
 * selects min(K d, 512). */
JSM_API jsm_status jsm_model_fit(const jsm_basis* const* bases, const char* const* view_ids, size_t views,
                                 size_t max_functions, const jsm_eigen_options* options, jsm_model** out);
JSM_API size_t jsm_model_n(const jsm_model* model);
JSM_API size_t jsm_model_views(const jsm_model* model);
JSM_API size_t jsm_model_basis_dimension(const jsm_model* model);
JSM_API size_t jsm_model_max_functions(const jsm_model* model);
JSM_API size_t jsm_model_selected(const jsm_model* model);
/* NaN until a threshold has been applied. */
JSM_API double jsm_model_threshold(const jsm_model* model);
JSM_API const char* jsm_model_view_id(const jsm_model* model, size_t view);
JSM_API void jsm_model_view_params(const jsm_model* model, size_t view, jsm_kernel_params* out);
/* max_functions values. */
JSM_API jsm_status jsm_model_singular_values(const jsm_model* model, double* out);
JSM_API jsm_status jsm_model_scores(const jsm_model* model, size_t view, double* out);
JSM_API jsm_status jsm_model_min_scores(const jsm_model* model, double* out);
/* N x max_functions. */
JSM_API jsm_status jsm_model_functions(const jsm_model* model, jsm_matrix** out);
/* Stores M (leading run of min-view scores above `threshold`) and the
 * threshold; `mode` is recorded in the manifest ("analytic", "jackstraw", ...). */
JSM_API jsm_status jsm_model_select(jsm_model* model, double threshold, const char* mode, size_t* selected);
JSM_API void jsm_model_set_seed(jsm_model* model, uint64_t seed);
JSM_API jsm_status jsm_model_save(const jsm_model* model, const char* dir);
JSM_API jsm_status jsm_model_load(const char* dir, jsm_model** out);
/* Human-readable report, valid until the model changes or is freed. */
JSM_API const char* jsm_model_summary(jsm_model* model);
JSM_API void jsm_model_free(jsm_model* model);

/* ------------------------------------------------------------------------
 * Significance thresholds
 * ------------------------------------------------------------------------ */

JSM_API jsm_status jsm_analytic_threshold(size_t n, size_t d, double* out);

/* Permutation threshold from the y basis rows (no eigensolve per trial).
 * `second_cosines` may be NULL, otherwise receives `permutations` values. */
JSM_API jsm_status jsm_jackstraw_threshold(const jsm_basis* x, const jsm_basis* y, int permutations, uint64_t seed,
                                           double* threshold, double* second_cosines);
/* Same statistic rebuilding the y kernel and eigenbasis for every trial. */
JSM_API jsm_status jsm_jackstraw_threshold_rebuild(const jsm_basis* x, const jsm_dataset* y,
                                                   const jsm_kernel_params* params, int permutations,
                                                   uint64_t seed, const jsm_eigen_options* options,
                                                   double* threshold, double* second_cosines);

/* ------------------------------------------------------------------------
 * Out-of-sample extension
 * ------------------------------------------------------------------------ */

typedef struct jsm_extender jsm_extender;

/* Extends the first M selected functions. One basis and training dataset per
 * model view; eigen-directions below cutoff_ratio x lambda_1 are dropped
 * (<= 0 selects 1e-8). */
JSM_API jsm_status jsm_extender_build(const jsm_model* model, const jsm_basis* const* bases,
                                      const jsm_dataset* const* datasets, size_t views, double cutoff_ratio,
                                      jsm_extender** out);
JSM_API size_t jsm_extender_views(const jsm_extender* ext);
JSM_API size_t jsm_extender_functions(const jsm_extender* ext);
JSM_API size_t jsm_extender_view_dim(const jsm_extender* ext, size_t view);
JSM_API size_t jsm_extender_retained(const jsm_extender* ext, size_t view);
JSM_API void jsm_extender_view_params(const jsm_extender* ext, size_t view, jsm_kernel_params* out);
/* One observation tuple given as concatenated per-view coordinates
 * (sum of view dims values). Writes `functions` values. Thread-safe. */
JSM_API jsm_status jsm_extender_extend_row(const jsm_extender* ext, const double* row, size_t length, double* out);
/* One N* x p_k matrix per view. */
JSM_API jsm_status jsm_extender_extend(const jsm_extender* ext, const jsm_matrix* const* points, size_t views,
                                       jsm_matrix** out);
/* Partial extension from a single view. */
JSM_API jsm_status jsm_extender_extend_view(const jsm_extender* ext, size_t view, const jsm_matrix* points,
                                            jsm_matrix** out);
/* Stored under dir/extension/. */
JSM_API jsm_status jsm_extender_save(const jsm_extender* ext, const char* dir);
JSM_API jsm_status jsm_extender_load(const char* dir, jsm_extender** out);
JSM_API void jsm_extender_free(jsm_extender* ext);

/* ------------------------------------------------------------------------
 * Embedding and preprocessing
 * ------------------------------------------------------------------------ */

typedef struct jsm_embedding jsm_embedding;

/* Diffusion maps on the rows of `features`; bandwidth <= 0 selects
 * 0.3 x median pairwise distance. */
JSM_API jsm_status jsm_diffusion_maps(const jsm_matrix* features, size_t m, double bandwidth,
                                      jsm_embedding** out);
JSM_API size_t jsm_embedding_dim(const jsm_embedding* emb);
JSM_API double jsm_embedding_bandwidth(const jsm_embedding* emb);
JSM_API jsm_status jsm_embedding_eigenvalues(const jsm_embedding* emb, double* out);
JSM_API jsm_status jsm_embedding_coordinates(const jsm_embedding* emb, jsm_matrix** out);
JSM_API void jsm_embedding_free(jsm_embedding* emb);

typedef struct jsm_pca jsm_pca;

JSM_API jsm_status jsm_pca_fit(const jsm_matrix* data, size_t q, jsm_pca** out);
JSM_API size_t jsm_pca_input_dim(const jsm_pca* pca);
JSM_API size_t jsm_pca_output_dim(const jsm_pca* pca);
JSM_API jsm_status jsm_pca_explained(const jsm_pca* pca, double* out);
JSM_API jsm_status jsm_pca_apply(const jsm_pca* pca, const jsm_matrix* data, jsm_matrix** out);
JSM_API void jsm_pca_free(jsm_pca* pca);

/* Row i concatenates input rows i .. i + horizon. */
JSM_API jsm_status jsm_delay_embed(const jsm_matrix* data, size_t horizon, jsm_matrix** out);

/* ------------------------------------------------------------------------
 * Synthetic data
 * ------------------------------------------------------------------------ */

/* Spiral (N x 2) and torus (N x 3) views; truth is N x 3 with columns
 * (z, eps, eta). Evaluation only. */
JSM_API jsm_status jsm_generate_toy(size_t n, uint64_t seed, jsm_matrix** spiral, jsm_matrix** torus,
                                    jsm_matrix** truth);
/* Annulus at angle 2 pi z (N x 2) paired with the torus. */
JSM_API jsm_status jsm_generate_ring_toy(size_t n, uint64_t seed, jsm_matrix** ring, jsm_matrix** torus,
                                         jsm_matrix** truth);
/* (cos 2 pi z, sin 2 pi z) for an N x 1 column of z. */
JSM_API jsm_status jsm_circle_view(const jsm_matrix* z, jsm_matrix** out);

typedef struct jsm_integrator_options {
    double dt;      /* default 0.01 */
    double t_max;   /* default 200 */
    double tol;     /* default 1e-8 */
    double x0[2];   /* default (0, 0) */
} jsm_integrator_options;

JSM_API void jsm_integrator_options_default(jsm_integrator_options* options);
/* parameters (p1, p2): N x 2, steady states: N x 2, all parameters: N x 3,
 * truth: N x 2 with columns (p1 + p2^3, p3). `options` may be NULL. */
JSM_API jsm_status jsm_generate_airplane(size_t n, uint64_t seed, const jsm_integrator_options* options,
                                         jsm_matrix** parameters, jsm_matrix** steady_states,
                                         jsm_matrix** all_parameters, jsm_matrix** truth);
JSM_API jsm_status jsm_airplane_steady_state(const double p[3], const jsm_integrator_options* options,
                                             double x[2]);
JSM_API void jsm_airplane_closed_form(const double p[3], double x[2]);

/* ------------------------------------------------------------------------
 * Metrics
 * ------------------------------------------------------------------------ */

JSM_API jsm_status jsm_distance_correlation(const double* a, const double* b, size_t n, double* out);
JSM_API jsm_status jsm_relative_rmse(const double* estimate, const double* reference, size_t n, double* out);
JSM_API jsm_status jsm_conditional_variance_ratio(const double* values, const double* key, size_t n, size_t bins,
                                                  double* out);
/* std(radius) / mean(radius) of an N x 2 point set about its centroid. */
JSM_API jsm_status jsm_radius_spread(const jsm_matrix* points, double* out);

#ifdef __cplusplus
}
#endif

#endif /* JSMOOTH_H */
