#include "cli_common.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace jsmcli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ExtendOptions {
    std::string dir;
    std::string config_path;
    long long view = -1;
};

/// Differences between a config's kernel and the one a view was trained with.
std::string kernel_mismatch(const KernelConfig& c, const jsm_kernel_params& stored) {
    std::ostringstream why;
    if (c.kind != jsm_kernel_kind_name(stored.kind)) {
        why << "kind " << c.kind << " vs " << jsm_kernel_kind_name(stored.kind);
    } else if (stored.kind == JSM_KERNEL_KNN) {
        if (static_cast<size_t>(c.k) != stored.k) why << "k " << c.k << " vs " << stored.k;
        if (c.delta != stored.delta) why << (why.tellp() ? ", " : "") << "delta " << c.delta << " vs " << stored.delta;
    } else if (c.bandwidth > 0.0) {
        if (std::abs(c.bandwidth - stored.bandwidth) > 1e-12 * stored.bandwidth)
            why << "bandwidth " << c.bandwidth << " vs " << stored.bandwidth;
    } else if (c.bandwidth_factor != stored.bandwidth_factor) {
        why << "bandwidth_factor " << c.bandwidth_factor << " vs " << stored.bandwidth_factor;
    }
    return why.str();
}

void run_extend(const ExtendOptions& o) {
    jsm_extender* e = nullptr;
    check(jsm_extender_load(o.dir.c_str(), &e), "loading the extension of " + o.dir);
    ExtenderPtr ext(e);
    const size_t views = jsm_extender_views(e), m = jsm_extender_functions(e);

    if (!o.config_path.empty()) {
        RunConfig config;
        try {
            config = load_run_config(o.config_path);
        } catch (const ConfigError& err) {
            throw Failure(err.code, err.what());
        }
        if (!config.views.empty() && config.views.size() != views)
            throw Failure(1, "config lists " + std::to_string(config.views.size()) + " views but the model has " +
                                 std::to_string(views));
        for (size_t k = 0; k < views; ++k) {
            jsm_kernel_params stored;
            jsm_extender_view_params(e, k, &stored);
            const std::string why = kernel_mismatch(config.kernel, stored);
            if (!why.empty())
                throw Failure(1, "refusing to extend: config kernel does not match the model's view " +
                                     std::to_string(k) + " kernel (" + why + ")");
        }
    }

    size_t width = 0;
    if (o.view >= 0) {
        if (static_cast<size_t>(o.view) >= views) throw Failure(1, "--view out of range");
        width = jsm_extender_view_dim(e, static_cast<size_t>(o.view));
    } else {
        for (size_t k = 0; k < views; ++k) width += jsm_extender_view_dim(e, k);
    }

    std::vector<double> row(width + 1), out(m);
    std::string nan_line;
    for (size_t j = 0; j < m; ++j) nan_line += j ? ",nan" : "nan";
    std::string line;
    size_t line_no = 0, bad = 0;
    jsm_matrix* single = nullptr;
    check(jsm_matrix_create(1, width, nullptr, &single), "allocating row");
    MatrixPtr single_row(single);

    while (std::getline(std::cin, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        size_t count = 0;
        jsm_status s = jsm_parse_csv_row(line.c_str(), row.data(), row.size(), &count);
        if (s == JSM_OK && count != width) {
            s = JSM_ERR_DATA;
        }
        if (s == JSM_OK) {
            if (o.view >= 0) {
                for (size_t c = 0; c < width; ++c) jsm_matrix_set(single, 0, c, row[c]);
                jsm_matrix* r = nullptr;
                s = jsm_extender_extend_view(e, static_cast<size_t>(o.view), single, &r);
                if (s == JSM_OK) {
                    MatrixPtr rp(r);
                    for (size_t j = 0; j < m; ++j) out[j] = jsm_matrix_get(r, 0, j);
                }
            } else {
                s = jsm_extender_extend_row(e, row.data(), width, out.data());
            }
        }
        if (s != JSM_OK) {
            ++bad;
            std::string why = count != width && count > 0 ? "expected " + std::to_string(width) + " values, got " +
                                                                std::to_string(count)
                                                          : jsm_last_error();
            std::cerr << "line " << line_no << ": " << why << '\n';
            std::cout << nan_line << std::endl;
            continue;
        }
        std::cout << format_row(out.data(), m) << std::endl;
    }
    if (bad > 0) throw Failure(2, std::to_string(bad) + " of the input lines could not be extended");
}

// ---------------------------------------------------------------------------

struct EmbedOptions {
    std::string dir;
    size_t coords = 2;
    size_t functions = 0;
    size_t report = 20;
    double bandwidth = 0.0;
    std::string out;
};

void run_embed(const EmbedOptions& o) {
    if (o.coords < 1) throw Failure(1, "--coords must be at least 1");
    jsm_model* mp = nullptr;
    check(jsm_model_load(o.dir.c_str(), &mp), "loading model");
    ModelPtr model(mp);
    const size_t n = jsm_model_n(mp);
    const size_t use = o.functions > 0 ? o.functions : jsm_model_selected(mp);
    if (use == 0) throw Failure(1, "the model has no selected functions; pass --functions");
    if (use > jsm_model_max_functions(mp)) throw Failure(1, "--functions exceeds the model's M_max");

    jsm_matrix *u = nullptr, *features = nullptr;
    check(jsm_model_functions(mp, &u), "reading functions");
    MatrixPtr up(u);
    check(jsm_matrix_columns(u, 0, use, &features), "selecting functions");
    MatrixPtr fp(features);

    const size_t wanted = std::min(std::max(o.coords, o.report), n - 2);
    if (o.coords > wanted) throw Failure(1, "--coords must be below N - 1");
    jsm_embedding* emb = nullptr;
    check(jsm_diffusion_maps(features, wanted, o.bandwidth, &emb), "diffusion maps");
    EmbeddingPtr ep(emb);
    std::vector<double> lambda(wanted);
    check(jsm_embedding_eigenvalues(emb, lambda.data()), "eigenvalues");
    jsm_matrix *all = nullptr, *coords = nullptr;
    check(jsm_embedding_coordinates(emb, &all), "coordinates");
    MatrixPtr ap(all);
    check(jsm_matrix_columns(all, 0, o.coords, &coords), "selecting coordinates");
    MatrixPtr cp(coords);

    const std::string out = o.out.empty() ? (fs::path(o.dir) / "embedding.csv").string() : o.out;
    std::vector<std::string> header;
    for (size_t i = 1; i <= o.coords; ++i) header.push_back("phi" + std::to_string(i));
    write_matrix(out, coords, header);

    std::ofstream ev(fs::path(out).replace_extension("").string() + "_eigenvalues.csv");
    ev << "index,eigenvalue\n";
    for (size_t i = 0; i < wanted; ++i) ev << i + 1 << ',' << format_row(&lambda[i], 1) << '\n';

    std::cout << "diffusion maps on " << use << " jointly smooth functions, bandwidth "
              << jsm_embedding_bandwidth(emb) << "\nnon-trivial Markov eigenvalues:\n";
    for (size_t i = 0; i < wanted; ++i) std::cout << "  " << i + 1 << "  " << lambda[i] << (i < o.coords ? "  *" : "") << '\n';
    std::cout << "wrote " << out << '\n';
}

// ---------------------------------------------------------------------------

struct PlotOptions {
    std::string dir;
    std::string truth;
    std::string column = "0";
    size_t functions = 0;
    std::string out_dir;
};

/// Column index by header name or number.
size_t truth_column(const std::string& path, const std::string& which, size_t cols) {
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    std::stringstream names(header);
    std::string name;
    for (size_t i = 0; std::getline(names, name, ','); ++i)
        if (name == which) return i;
    try {
        size_t used = 0;
        const size_t c = std::stoul(which, &used);
        if (used == which.size() && c < cols) return c;
    } catch (const std::exception&) {
    }
    throw Failure(1, "truth column '" + which + "' not found in " + path);
}

void run_plot_data(const PlotOptions& o) {
    jsm_model* mp = nullptr;
    check(jsm_model_load(o.dir.c_str(), &mp), "loading model");
    ModelPtr model(mp);
    const size_t n = jsm_model_n(mp), mmax = jsm_model_max_functions(mp), views = jsm_model_views(mp);
    const size_t use =
        std::min(mmax, o.functions > 0 ? o.functions : std::max<size_t>(jsm_model_selected(mp) + 1, 4));
    const std::string out_dir = o.out_dir.empty() ? (fs::path(o.dir) / "plot").string() : o.out_dir;
    ensure_dir(out_dir);

    // Singular values and per-view scores against the threshold.
    std::vector<double> sigma(mmax), score(mmax);
    check(jsm_model_singular_values(mp, sigma.data()), "sigma");
    const double e0 = jsm_model_threshold(mp);
    {
        std::ofstream s(fs::path(out_dir) / "scores.csv");
        s << "index,view,sigma,score,threshold,selected\n";
        for (size_t k = 0; k < views; ++k) {
            check(jsm_model_scores(mp, k, score.data()), "scores");
            for (size_t i = 0; i < mmax; ++i)
                s << i + 1 << ',' << jsm_model_view_id(mp, k) << ',' << format_row(&sigma[i], 1) << ','
                  << format_row(&score[i], 1) << ',' << (std::isfinite(e0) ? format_row(&e0, 1) : "nan") << ','
                  << (i < jsm_model_selected(mp) ? 1 : 0) << '\n';
        }
    }

    if (!o.truth.empty()) {
        MatrixPtr truth = read_matrix(o.truth);
        if (jsm_matrix_rows(truth.get()) != n)
            throw Failure(2, "truth has " + std::to_string(jsm_matrix_rows(truth.get())) + " rows, model has " +
                                 std::to_string(n));
        const size_t c = truth_column(o.truth, o.column, jsm_matrix_cols(truth.get()));
        const std::vector<double> key = column(truth.get(), c);
        jsm_matrix* u = nullptr;
        check(jsm_model_functions(mp, &u), "functions");
        MatrixPtr up(u);
        std::ofstream f(fs::path(out_dir) / "functions_vs_truth.csv");
        f << "sample,function,value,truth,distance_correlation\n";
        for (size_t j = 0; j < use; ++j) {
            const std::vector<double> fj = column(u, j);
            double dc = 0.0;
            check(jsm_distance_correlation(fj.data(), key.data(), n, &dc), "distance correlation");
            for (size_t i = 0; i < n; ++i)
                f << i << ',' << j + 1 << ',' << format_row(&fj[i], 1) << ',' << format_row(&key[i], 1) << ','
                  << format_row(&dc, 1) << '\n';
            std::cout << "f_" << j + 1 << ": distance correlation with truth = " << dc << '\n';
        }
    }
    std::cout << "wrote plot data to " << out_dir << '\n';
}

}  // namespace

void add_extend(CLI::App& app) {
    auto o = std::make_shared<ExtendOptions>();
    auto* sub = app.add_subcommand(
        "extend", "Stream CSV rows (concatenated per-view coordinates) from stdin, write M extended values per line");
    sub->add_option("--model", o->dir, "Model directory written by fit")->required();
    sub->add_option("--config", o->config_path, "RunConfig to check against the model's kernels");
    sub->add_option("--view", o->view, "Partial extension from this view's coordinates only");
    sub->callback([o] { run_extend(*o); });
}

void add_embed(CLI::App& app) {
    auto o = std::make_shared<EmbedOptions>();
    auto* sub = app.add_subcommand("embed", "Diffusion-maps embedding of the selected jointly smooth functions");
    sub->add_option("--model", o->dir, "Model directory written by fit")->required();
    sub->add_option("--coords", o->coords, "Embedding coordinates written")->capture_default_str();
    sub->add_option("--functions", o->functions, "Functions used as features (default: selected M)");
    sub->add_option("--report", o->report, "Eigenvalues reported")->capture_default_str();
    sub->add_option("--bandwidth", o->bandwidth, "Gaussian bandwidth (<= 0: 0.3 x median)");
    sub->add_option("--out", o->out, "Output CSV (default: <model>/embedding.csv)");
    sub->callback([o] { run_embed(*o); });
}

void add_plot_data(CLI::App& app) {
    auto o = std::make_shared<PlotOptions>();
    auto* sub = app.add_subcommand("plot-data", "Write tidy CSVs for plotting scores and f_m against ground truth");
    sub->add_option("--model", o->dir, "Model directory written by fit")->required();
    sub->add_option("--truth", o->truth, "Ground-truth CSV (evaluation only)");
    sub->add_option("--truth-column", o->column, "Column name or index in the truth CSV")->capture_default_str();
    sub->add_option("--functions", o->functions, "Functions written (default: M + 1, at least 4)");
    sub->add_option("--out-dir", o->out_dir, "Output directory (default: <model>/plot)");
    sub->callback([o] { run_plot_data(*o); });
}

}  // namespace jsmcli
