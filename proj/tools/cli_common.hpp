#pragma once

#include "jsmooth/jsmooth.h"
#include "run_config.hpp"

#include <json.hpp>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace jsmcli {

/// Aborts the current command with a CLI exit status.
struct Failure : std::runtime_error {
    Failure(int code, const std::string& what) : std::runtime_error(what), code(code) {}
    int code;
};

/// Throws Failure carrying the library message when `status` is not JSM_OK.
void check(jsm_status status, const std::string& context);

template <typename T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using MatrixPtr = std::unique_ptr<jsm_matrix, Deleter<jsm_matrix, jsm_matrix_free>>;
using DatasetPtr = std::unique_ptr<jsm_dataset, Deleter<jsm_dataset, jsm_dataset_free>>;
using KernelPtr = std::unique_ptr<jsm_kernel, Deleter<jsm_kernel, jsm_kernel_free>>;
using BasisPtr = std::unique_ptr<jsm_basis, Deleter<jsm_basis, jsm_basis_free>>;
using ModelPtr = std::unique_ptr<jsm_model, Deleter<jsm_model, jsm_model_free>>;
using ExtenderPtr = std::unique_ptr<jsm_extender, Deleter<jsm_extender, jsm_extender_free>>;
using EmbeddingPtr = std::unique_ptr<jsm_embedding, Deleter<jsm_embedding, jsm_embedding_free>>;
using PcaPtr = std::unique_ptr<jsm_pca, Deleter<jsm_pca, jsm_pca_free>>;

MatrixPtr read_matrix(const std::string& path);
/// CSV with an optional header line (empty `header` writes none).
void write_matrix(const std::string& path, const jsm_matrix* m, const std::vector<std::string>& header = {});
std::string format_row(const double* values, size_t count);
std::vector<double> column(const jsm_matrix* m, size_t col);

nlohmann::json read_json(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);
void ensure_dir(const std::string& dir);

/// Comma-separated integers ("10000,20000").
std::vector<long long> parse_int_list(const std::string& text);

// ---------------------------------------------------------------------------
// Pipeline pieces shared by fit / threshold / select
// ---------------------------------------------------------------------------

jsm_kernel_params kernel_params(const RunConfig& config);
jsm_eigen_options eigen_options(const RunConfig& config);

struct Views {
    std::vector<DatasetPtr> datasets;
    std::vector<std::string> ids;
    size_t n = 0;
    std::vector<const jsm_dataset*> raw() const;
};

/// Loads every view; a row-count mismatch fails with exit 2 naming the views.
Views load_views(const RunConfig& config);

struct Bases {
    std::vector<BasisPtr> bases;
    size_t d = 0;
    std::vector<const jsm_basis*> raw() const;
};

size_t resolve_d(const RunConfig& config, size_t n);
Bases compute_bases(const RunConfig& config, const Views& views);
/// Loads `dir`/bases/view_<k> when present, otherwise recomputes.
Bases bases_for_model(const std::string& dir, const RunConfig& config, const Views& views);

struct ThresholdResult {
    std::string mode;
    double value = 0.0;
    std::vector<double> second_cosines;
    int permutations = 0;
    bool rebuild = false;
};

/// analytic: closed form at (N, d). jackstraw: view 0 against every other
/// view, the largest threshold wins.
ThresholdResult compute_threshold(const RunConfig& config, const Views& views, const Bases& bases, size_t n,
                                  size_t d);
nlohmann::json threshold_json(const ThresholdResult& t, std::uint64_t seed);

/// Applies the threshold, saves the model and (for M >= 1) the extender.
size_t select_and_save(jsm_model* model, const ThresholdResult& t, const RunConfig& config, const Views& views,
                       const Bases& bases, const std::string& dir);

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

void add_generate(CLI::App& app);
void add_fit(CLI::App& app);
void add_threshold(CLI::App& app);
void add_select(CLI::App& app);
void add_extend(CLI::App& app);
void add_embed(CLI::App& app);
void add_plot_data(CLI::App& app);
void add_preprocess(CLI::App& app);
void add_bench(CLI::App& app);

}  // namespace jsmcli
