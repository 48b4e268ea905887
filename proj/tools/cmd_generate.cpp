#include "cli_common.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace jsmcli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GenerateOptions {
    std::string kind;
    size_t n = 4000;
    std::uint64_t seed = 0;
    std::string out_dir = "data";
    double dt = 0.01, t_max = 200.0, tol = 1e-8;
};

struct Output {
    std::string id;
    MatrixPtr values;
    std::vector<std::string> columns;
};

void run_generate(const GenerateOptions& o) {
    if (o.n < 2) throw Failure(1, "--n must be at least 2");
    std::vector<Output> views;
    MatrixPtr truth;
    std::vector<std::string> truth_columns;
    json extra = json::object();

    if (o.kind == "toy" || o.kind == "toy3" || o.kind == "ring") {
        jsm_matrix *first = nullptr, *torus = nullptr, *t = nullptr;
        if (o.kind == "ring")
            check(jsm_generate_ring_toy(o.n, o.seed, &first, &torus, &t), "generating ring toy");
        else
            check(jsm_generate_toy(o.n, o.seed, &first, &torus, &t), "generating toy");
        truth.reset(t);
        truth_columns = {"z", "eps", "eta"};
        views.push_back({o.kind == "ring" ? "ring" : "spiral", MatrixPtr(first), {"x1", "x2"}});
        views.push_back({"torus", MatrixPtr(torus), {"y1", "y2", "y3"}});
        if (o.kind == "toy3") {
            jsm_matrix *z = nullptr, *circle = nullptr;
            check(jsm_matrix_columns(truth.get(), 0, 1, &z), "selecting z");
            MatrixPtr zp(z);
            check(jsm_circle_view(z, &circle), "circle view");
            views.push_back({"circle", MatrixPtr(circle), {"c1", "c2"}});
        }
    } else if (o.kind == "airplane") {
        jsm_integrator_options io;
        jsm_integrator_options_default(&io);
        io.dt = o.dt;
        io.t_max = o.t_max;
        io.tol = o.tol;
        jsm_matrix *params = nullptr, *states = nullptr, *all = nullptr, *t = nullptr;
        check(jsm_generate_airplane(o.n, o.seed, &io, &params, &states, &all, &t), "generating airplane data");
        MatrixPtr all_params(all);
        truth.reset(t);
        truth_columns = {"effective", "p3"};
        views.push_back({"parameters", MatrixPtr(params), {"p1", "p2"}});
        views.push_back({"steady_states", MatrixPtr(states), {"x1", "x2"}});
        extra["integrator"] = {{"scheme", "rk4"}, {"dt", o.dt}, {"t_max", o.t_max}, {"tol", o.tol}, {"x0", {0.0, 0.0}}};
        extra["parameter_distribution"] = "uniform[-1,1]^3";
    } else {
        throw Failure(1, "unknown generator '" + o.kind + "' (toy, toy3, ring, airplane)");
    }

    ensure_dir(o.out_dir);
    json view_list = json::array();
    RunConfig config;
    for (const Output& v : views) {
        const std::string file = v.id + ".csv";
        write_matrix((fs::path(o.out_dir) / file).string(), v.values.get());
        view_list.push_back({{"id", v.id}, {"file", file}, {"columns", v.columns}});
        config.views.push_back({file, v.id});
    }
    write_matrix((fs::path(o.out_dir) / "truth.csv").string(), truth.get(), truth_columns);

    json provenance = {{"generator", o.kind},
                       {"n", o.n},
                       {"seed", o.seed},
                       {"library_version", jsm_version()},
                       {"views", view_list},
                       {"truth", {{"file", "truth.csv"}, {"columns", truth_columns}, {"note", "evaluation only"}}}};
    provenance.update(extra);
    write_json((fs::path(o.out_dir) / "provenance.json").string(), provenance);

    // A starting config for `fit`; its paths are relative to the config file.
    config.seed = o.seed;
    config.output_dir = "fit";
    save_run_config(config, (fs::path(o.out_dir) / "config.json").string());
    std::cout << "wrote " << views.size() << " views of " << o.n << " rows to " << o.out_dir << '\n';
}

}  // namespace

void add_generate(CLI::App& app) {
    auto opts = std::make_shared<GenerateOptions>();
    auto* sub = app.add_subcommand("generate", "Generate a synthetic multi-view dataset");
    sub->add_option("kind", opts->kind, "toy | toy3 | ring | airplane")->required();
    sub->add_option("--n", opts->n, "Number of samples")->capture_default_str();
    sub->add_option("--seed", opts->seed, "Random seed")->capture_default_str();
    sub->add_option("--out-dir", opts->out_dir, "Output directory")->capture_default_str();
    sub->add_option("--dt", opts->dt, "airplane: RK4 step")->capture_default_str();
    sub->add_option("--t-max", opts->t_max, "airplane: integration horizon")->capture_default_str();
    sub->add_option("--tol", opts->tol, "airplane: steady-state tolerance on |dx/dt|")->capture_default_str();
    sub->callback([opts] { run_generate(*opts); });
}

}  // namespace jsmcli
