#include "cli_common.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace jsmcli {

namespace fs = std::filesystem;
using nlohmann::json;

void check(jsm_status status, const std::string& context) {
    if (status == JSM_OK) return;
    throw Failure(static_cast<int>(status), context + ": " + jsm_last_error());
}

MatrixPtr read_matrix(const std::string& path) {
    jsm_matrix* m = nullptr;
    check(jsm_matrix_read_csv(path.c_str(), &m), "reading " + path);
    return MatrixPtr(m);
}

std::string format_row(const double* values, size_t count) {
    std::string buffer(64 + 32 * count, '\0');
    size_t needed = 0;
    check(jsm_format_csv_row(values, count, buffer.data(), buffer.size(), &needed), "formatting row");
    buffer.resize(needed);
    return buffer;
}

void write_matrix(const std::string& path, const jsm_matrix* m, const std::vector<std::string>& header) {
    if (header.empty()) {
        check(jsm_matrix_write_csv(m, path.c_str()), "writing " + path);
        return;
    }
    std::ofstream out(path);
    if (!out) throw Failure(2, "cannot write " + path);
    for (size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    const size_t rows = jsm_matrix_rows(m), cols = jsm_matrix_cols(m);
    std::vector<double> all(rows * cols);
    check(jsm_matrix_copy(m, all.data()), "copying matrix");
    for (size_t i = 0; i < rows; ++i) out << format_row(all.data() + i * cols, cols) << '\n';
    if (!out) throw Failure(2, "write failed: " + path);
}

std::vector<double> column(const jsm_matrix* m, size_t col) {
    std::vector<double> out(jsm_matrix_rows(m));
    for (size_t i = 0; i < out.size(); ++i) out[i] = jsm_matrix_get(m, i, col);
    return out;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Failure(2, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Failure(2, "malformed JSON in " + path + ": " + e.what());
    }
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Failure(2, "cannot write " + path);
    out << j.dump(2) << '\n';
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Failure(2, "cannot create directory " + dir + ": " + ec.message());
}

std::vector<long long> parse_int_list(const std::string& text) {
    std::vector<long long> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size() || v < 1) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw Failure(1, "expected a comma-separated list of positive integers, got '" + text + "'");
        }
    }
    if (out.empty()) throw Failure(1, "empty integer list");
    return out;
}

// ---------------------------------------------------------------------------

jsm_kernel_params kernel_params(const RunConfig& config) {
    jsm_kernel_params p;
    jsm_kernel_params_default(&p);
    check(jsm_kernel_kind_parse(config.kernel.kind.c_str(), &p.kind), "kernel kind");
    p.bandwidth = config.kernel.bandwidth;
    p.bandwidth_factor = config.kernel.bandwidth_factor;
    p.k = static_cast<size_t>(config.kernel.k);
    p.delta = config.kernel.delta;
    p.seed = config.seed;
    return p;
}

jsm_eigen_options eigen_options(const RunConfig& config) {
    jsm_eigen_options o;
    jsm_eigen_options_default(&o);
    o.method = config.eigensolver == "dense"     ? JSM_EIGEN_DENSE
               : config.eigensolver == "lanczos" ? JSM_EIGEN_LANCZOS
                                                 : JSM_EIGEN_AUTO;
    o.seed = config.seed;
    return o;
}

std::vector<const jsm_dataset*> Views::raw() const {
    std::vector<const jsm_dataset*> out;
    for (const auto& d : datasets) out.push_back(d.get());
    return out;
}

std::vector<const jsm_basis*> Bases::raw() const {
    std::vector<const jsm_basis*> out;
    for (const auto& b : bases) out.push_back(b.get());
    return out;
}

Views load_views(const RunConfig& config) {
    Views views;
    for (size_t k = 0; k < config.views.size(); ++k) {
        const ViewConfig& v = config.views[k];
        const std::string id = v.id.empty() ? fs::path(v.path).stem().string() : v.id;
        jsm_dataset* ds = nullptr;
        check(jsm_dataset_load_csv(v.path.c_str(), id.c_str(), &ds), "loading view '" + id + "'");
        views.datasets.emplace_back(ds);
        views.ids.push_back(id);
    }
    views.n = jsm_dataset_rows(views.datasets.front().get());
    for (size_t k = 1; k < views.datasets.size(); ++k) {
        const size_t rows = jsm_dataset_rows(views.datasets[k].get());
        if (rows != views.n)
            throw Failure(2, "views are not row-aligned: '" + views.ids[0] + "' has " + std::to_string(views.n) +
                                 " rows but '" + views.ids[k] + "' has " + std::to_string(rows));
    }
    return views;
}

size_t resolve_d(const RunConfig& config, size_t n) {
    const size_t d = config.d > 0 ? static_cast<size_t>(config.d) : jsm_default_basis_dimension(n);
    if (d >= n) throw Failure(1, "d = " + std::to_string(d) + " must be below N = " + std::to_string(n));
    return d;
}

Bases compute_bases(const RunConfig& config, const Views& views) {
    Bases out;
    out.d = resolve_d(config, views.n);
    const jsm_kernel_params params = kernel_params(config);
    const jsm_eigen_options options = eigen_options(config);
    for (size_t k = 0; k < views.datasets.size(); ++k) {
        jsm_kernel* kernel = nullptr;
        check(jsm_kernel_build(views.datasets[k].get(), &params, &kernel), "kernel for view '" + views.ids[k] + "'");
        KernelPtr owned(kernel);
        jsm_basis* basis = nullptr;
        check(jsm_basis_compute(kernel, out.d, &options, &basis), "eigenbasis of view '" + views.ids[k] + "'");
        out.bases.emplace_back(basis);
    }
    return out;
}

Bases bases_for_model(const std::string& dir, const RunConfig& config, const Views& views) {
    const fs::path root = fs::path(dir) / "bases";
    if (!fs::exists(root)) return compute_bases(config, views);
    Bases out;
    for (size_t k = 0; k < views.datasets.size(); ++k) {
        jsm_basis* basis = nullptr;
        const std::string sub = (root / ("view_" + std::to_string(k))).string();
        check(jsm_basis_load(sub.c_str(), &basis), "loading basis " + sub);
        out.bases.emplace_back(basis);
    }
    out.d = jsm_basis_d(out.bases.front().get());
    return out;
}

ThresholdResult compute_threshold(const RunConfig& config, const Views& views, const Bases& bases, size_t n,
                                  size_t d) {
    ThresholdResult t;
    t.mode = config.threshold.mode;
    if (t.mode == "analytic") {
        check(jsm_analytic_threshold(n, d, &t.value), "analytic threshold");
        return t;
    }
    if (t.mode != "jackstraw") throw Failure(1, "no threshold to compute for mode '" + t.mode + "'");
    t.permutations = config.threshold.permutations;
    t.rebuild = config.threshold.rebuild;
    const jsm_kernel_params params = kernel_params(config);
    const jsm_eigen_options options = eigen_options(config);
    t.value = -1.0;
    for (size_t k = 1; k < bases.bases.size(); ++k) {
        double value = 0.0;
        std::vector<double> cosines(static_cast<size_t>(t.permutations));
        if (t.rebuild)
            check(jsm_jackstraw_threshold_rebuild(bases.bases[0].get(), views.datasets[k].get(), &params,
                                                  t.permutations, config.seed, &options, &value, cosines.data()),
                  "jackstraw threshold");
        else
            check(jsm_jackstraw_threshold(bases.bases[0].get(), bases.bases[k].get(), t.permutations, config.seed,
                                          &value, cosines.data()),
                  "jackstraw threshold");
        t.second_cosines.insert(t.second_cosines.end(), cosines.begin(), cosines.end());
        t.value = std::max(t.value, value);
    }
    return t;
}

json threshold_json(const ThresholdResult& t, std::uint64_t seed) {
    json j{{"mode", t.mode}, {"E0", t.value}, {"seed", seed}};
    if (t.mode == "jackstraw") {
        j["permutations"] = t.permutations;
        j["rebuild"] = t.rebuild;
        j["second_cosines"] = t.second_cosines;
    }
    return j;
}

size_t select_and_save(jsm_model* model, const ThresholdResult& t, const RunConfig& config, const Views& views,
                       const Bases& bases, const std::string& dir) {
    size_t m = 0;
    check(jsm_model_select(model, t.value, t.mode.c_str(), &m), "selecting M");
    check(jsm_model_save(model, dir.c_str()), "saving model to " + dir);
    const fs::path ext = fs::path(dir) / "extension";
    std::error_code ec;
    fs::remove_all(ext, ec);
    if (m >= 1) {
        jsm_extender* e = nullptr;
        const auto b = bases.raw();
        const auto d = views.raw();
        check(jsm_extender_build(model, b.data(), d.data(), b.size(), config.extension_cutoff, &e),
              "building the extension");
        ExtenderPtr owned(e);
        check(jsm_extender_save(e, dir.c_str()), "saving the extension");
    }
    return m;
}

}  // namespace jsmcli
