#include "cli_common.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>

namespace jsmcli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Command-line values that override the config file when given.
struct FitOverrides {
    std::string config_path;
    std::vector<std::string> views;
    RunConfig flags;
    bool save_bases = false;
    bool print_config = false;
    CLI::App* sub = nullptr;

    bool given(const std::string& name) const { return sub->count(name) > 0; }
};

RunConfig merge(const FitOverrides& o) {
    RunConfig c = o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
    // Relative paths inside a config file are relative to that file.
    if (!o.config_path.empty()) {
        const fs::path base = fs::path(o.config_path).parent_path();
        auto anchor = [&base](std::string& path) {
            if (fs::path(path).is_relative()) path = (base / path).lexically_normal().string();
        };
        for (ViewConfig& v : c.views) anchor(v.path);
        anchor(c.output_dir);
    }
    if (!o.views.empty()) {
        c.views.clear();
        for (const std::string& spec : o.views) {
            // path or id=path
            const auto eq = spec.find('=');
            if (eq == std::string::npos)
                c.views.push_back({spec, ""});
            else
                c.views.push_back({spec.substr(eq + 1), spec.substr(0, eq)});
        }
    }
    const RunConfig& f = o.flags;
    if (o.given("--kernel")) c.kernel.kind = f.kernel.kind;
    if (o.given("--bandwidth")) c.kernel.bandwidth = f.kernel.bandwidth;
    if (o.given("--bandwidth-factor")) c.kernel.bandwidth_factor = f.kernel.bandwidth_factor;
    if (o.given("--k")) c.kernel.k = f.kernel.k;
    if (o.given("--delta")) c.kernel.delta = f.kernel.delta;
    if (o.given("--d")) c.d = f.d;
    if (o.given("--m-max")) c.m_max = f.m_max;
    if (o.given("--threshold")) c.threshold.mode = f.threshold.mode;
    if (o.given("--permutations")) c.threshold.permutations = f.threshold.permutations;
    if (o.given("--jackstraw-rebuild")) c.threshold.rebuild = f.threshold.rebuild;
    if (o.given("--eigensolver")) c.eigensolver = f.eigensolver;
    if (o.given("--cutoff")) c.extension_cutoff = f.extension_cutoff;
    if (o.given("--seed")) c.seed = f.seed;
    if (o.given("--out-dir")) c.output_dir = f.output_dir;
    return c;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void run_fit(const FitOverrides& o) {
    RunConfig config;
    try {
        config = merge(o);
        validate(config, true);
    } catch (const ConfigError& e) {
        throw Failure(e.code, e.what());
    }
    if (o.print_config) {
        std::cout << to_json(config) << '\n';
        return;
    }

    const auto start = std::chrono::steady_clock::now();
    const Views views = load_views(config);
    const Bases bases = compute_bases(config, views);
    const double basis_seconds = seconds_since(start);

    const auto ids = views.ids;
    std::vector<const char*> id_ptrs;
    for (const auto& id : ids) id_ptrs.push_back(id.c_str());
    const auto raw = bases.raw();
    const jsm_eigen_options options = eigen_options(config);
    jsm_model* m = nullptr;
    check(jsm_model_fit(raw.data(), id_ptrs.data(), raw.size(), static_cast<size_t>(config.m_max), &options, &m),
          "fitting jointly smooth functions");
    ModelPtr model(m);
    jsm_model_set_seed(model.get(), config.seed);

    const std::string dir = config.output_dir;
    ensure_dir(dir);
    // The stored copy uses absolute paths so threshold/select work from any directory.
    RunConfig stored = config;
    for (ViewConfig& v : stored.views) {
        v.path = fs::absolute(v.path).lexically_normal().string();
        if (v.id.empty()) v.id = fs::path(v.path).stem().string();
    }
    save_run_config(stored, (fs::path(dir) / "config.json").string());
    if (o.save_bases)
        for (size_t k = 0; k < bases.bases.size(); ++k)
            check(jsm_basis_save(bases.bases[k].get(), (fs::path(dir) / "bases" / ("view_" + std::to_string(k))).c_str()),
                  "saving basis");

    size_t selected = 0;
    if (config.threshold.mode == "none") {
        check(jsm_model_save(model.get(), dir.c_str()), "saving model");
    } else {
        const ThresholdResult t =
            compute_threshold(config, views, bases, views.n, jsm_model_basis_dimension(model.get()));
        write_json((fs::path(dir) / "threshold.json").string(), threshold_json(t, config.seed));
        selected = select_and_save(model.get(), t, config, views, bases, dir);
    }
    std::cout << jsm_model_summary(model.get());
    std::cerr << "fit: K=" << views.datasets.size() << " N=" << views.n << " d=" << bases.d << " M=" << selected
              << " (bases " << basis_seconds << " s, total " << seconds_since(start) << " s) -> " << dir << '\n';
}

// ---------------------------------------------------------------------------

struct ModelCommand {
    std::string dir;
    std::string mode;
    int permutations = 0;
    std::uint64_t seed = 0;
    bool rebuild = false;
    bool apply = false;
    double value = NAN;
    CLI::App* sub = nullptr;
};

RunConfig model_config(const std::string& dir) {
    try {
        return load_run_config((fs::path(dir) / "config.json").string());
    } catch (const ConfigError& e) {
        throw Failure(e.code, e.what());
    }
}

void run_threshold(const ModelCommand& o) {
    RunConfig config = model_config(o.dir);
    if (!o.mode.empty()) config.threshold.mode = o.mode;
    if (o.sub->count("--permutations")) config.threshold.permutations = o.permutations;
    if (o.sub->count("--seed")) config.seed = o.seed;
    if (o.rebuild) config.threshold.rebuild = true;
    if (config.threshold.mode == "none") throw Failure(1, "threshold mode 'none' computes nothing");
    try {
        validate(config, true);
    } catch (const ConfigError& e) {
        throw Failure(e.code, e.what());
    }

    jsm_model* m = nullptr;
    check(jsm_model_load(o.dir.c_str(), &m), "loading model");
    ModelPtr model(m);
    const size_t n = jsm_model_n(model.get()), d = jsm_model_basis_dimension(model.get());

    ThresholdResult t;
    if (config.threshold.mode == "analytic" && !o.apply) {
        t = compute_threshold(config, Views{}, Bases{}, n, d);
    } else {
        const Views views = load_views(config);
        const Bases bases = bases_for_model(o.dir, config, views);
        t = compute_threshold(config, views, bases, n, d);
        if (o.apply) {
            const size_t selected = select_and_save(model.get(), t, config, views, bases, o.dir);
            std::cerr << "selected M = " << selected << '\n';
        }
    }
    write_json((fs::path(o.dir) / "threshold.json").string(), threshold_json(t, config.seed));
    std::cout.precision(17);
    std::cout << t.value << '\n';
}

void run_select(const ModelCommand& o) {
    const RunConfig config = model_config(o.dir);
    ThresholdResult t;
    if (std::isfinite(o.value)) {
        t.mode = "manual";
        t.value = o.value;
    } else {
        const json j = read_json((fs::path(o.dir) / "threshold.json").string());
        try {
            t.mode = j.at("mode").get<std::string>();
            t.value = j.at("E0").get<double>();
        } catch (const json::exception& e) {
            throw Failure(2, std::string("malformed threshold.json: ") + e.what());
        }
    }
    jsm_model* m = nullptr;
    check(jsm_model_load(o.dir.c_str(), &m), "loading model");
    ModelPtr model(m);
    const Views views = load_views(config);
    const Bases bases = bases_for_model(o.dir, config, views);
    const size_t selected = select_and_save(model.get(), t, config, views, bases, o.dir);
    std::cout << selected << '\n';
}

}  // namespace

void add_fit(CLI::App& app) {
    auto o = std::make_shared<FitOverrides>();
    auto* sub = app.add_subcommand("fit", "Fit jointly smooth functions; flags override the JSON config");
    o->sub = sub;
    RunConfig& f = o->flags;
    sub->add_option("--config", o->config_path, "RunConfig JSON");
    sub->add_option("--view", o->views, "View CSV (path or id=path), repeat per view; replaces config views");
    sub->add_option("--kernel", f.kernel.kind, "gaussian | knn");
    sub->add_option("--bandwidth", f.kernel.bandwidth, "Gaussian sigma (<= 0: factor x median)");
    sub->add_option("--bandwidth-factor", f.kernel.bandwidth_factor, "Median bandwidth factor");
    sub->add_option("--k", f.kernel.k, "knn: neighbors");
    sub->add_option("--delta", f.kernel.delta, "knn: scale");
    sub->add_option("--d", f.d, "Eigenvectors per view (0: N/4 capped at 2000)");
    sub->add_option("--m-max", f.m_max, "Functions computed (0: min(K d, 512))");
    sub->add_option("--threshold", f.threshold.mode, "analytic | jackstraw | none");
    sub->add_option("--permutations", f.threshold.permutations, "Jackstraw trials");
    sub->add_flag("--jackstraw-rebuild", f.threshold.rebuild, "Rebuild the permuted kernel per trial");
    sub->add_option("--eigensolver", f.eigensolver, "auto | lanczos | dense");
    sub->add_option("--cutoff", f.extension_cutoff, "Extension eigenvalue cutoff relative to lambda_1");
    sub->add_option("--seed", f.seed, "Seed for median subsampling, Lanczos start and permutations");
    sub->add_option("--out-dir", f.output_dir, "Output directory");
    sub->add_flag("--save-bases", o->save_bases, "Store the eigenbases next to the model");
    sub->add_flag("--print-config", o->print_config, "Print the merged config and exit");
    sub->callback([o] { run_fit(*o); });
}

void add_threshold(CLI::App& app) {
    auto o = std::make_shared<ModelCommand>();
    auto* sub = app.add_subcommand("threshold", "Compute the significance threshold E0 for a fitted model");
    o->sub = sub;
    sub->add_option("--model", o->dir, "Model directory written by fit")->required();
    sub->add_option("--mode", o->mode, "analytic | jackstraw (default: the model's config)");
    sub->add_option("--permutations", o->permutations, "Jackstraw trials");
    sub->add_option("--seed", o->seed, "Permutation seed");
    sub->add_flag("--rebuild", o->rebuild, "Rebuild the permuted kernel per trial");
    sub->add_flag("--apply", o->apply, "Also select M and rewrite the model");
    sub->callback([o] { run_threshold(*o); });
}

void add_select(CLI::App& app) {
    auto o = std::make_shared<ModelCommand>();
    auto* sub = app.add_subcommand("select", "Select M from a threshold and rebuild the extension");
    o->sub = sub;
    sub->add_option("--model", o->dir, "Model directory written by fit")->required();
    sub->add_option("--threshold", o->value, "E0 value (default: the model's threshold.json)");
    sub->callback([o] { run_select(*o); });
}

}  // namespace jsmcli
