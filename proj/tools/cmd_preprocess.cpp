#include "cli_common.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace jsmcli {

using nlohmann::json;

namespace {

struct PreprocessOptions {
    std::string input;
    std::string out;
    std::vector<std::string> steps;
};

void run_preprocess(const PreprocessOptions& o) {
    if (o.steps.empty()) throw Failure(1, "give at least one --step (pca=<q> or delay=<h>)");
    MatrixPtr data = read_matrix(o.input);
    json log = json::array();
    for (const std::string& step : o.steps) {
        const auto eq = step.find('=');
        const std::string op = step.substr(0, eq);
        long long value = -1;
        if (eq != std::string::npos) {
            try {
                value = std::stoll(step.substr(eq + 1));
            } catch (const std::exception&) {
            }
        }
        if (value < 0 || (op != "pca" && op != "delay"))
            throw Failure(1, "malformed step '" + step + "' (expected pca=<q> or delay=<h>)");

        const size_t in_rows = jsm_matrix_rows(data.get()), in_cols = jsm_matrix_cols(data.get());
        jsm_matrix* next = nullptr;
        json entry{{"op", op}, {"value", value}, {"input_shape", {in_rows, in_cols}}};
        if (op == "pca") {
            jsm_pca* p = nullptr;
            check(jsm_pca_fit(data.get(), static_cast<size_t>(value), &p), "pca=" + std::to_string(value));
            PcaPtr pca(p);
            std::vector<double> explained(static_cast<size_t>(value));
            check(jsm_pca_explained(p, explained.data()), "pca singular values");
            check(jsm_pca_apply(p, data.get(), &next), "pca projection");
            entry["singular_values"] = explained;
        } else {
            check(jsm_delay_embed(data.get(), static_cast<size_t>(value), &next), "delay=" + std::to_string(value));
        }
        data.reset(next);
        entry["output_shape"] = {jsm_matrix_rows(data.get()), jsm_matrix_cols(data.get())};
        log.push_back(entry);
    }
    write_matrix(o.out, data.get());
    write_json(o.out + ".json", json{{"input", o.input}, {"steps", log}});
    std::cout << "wrote " << jsm_matrix_rows(data.get()) << " x " << jsm_matrix_cols(data.get()) << " to " << o.out
              << '\n';
}

}  // namespace

void add_preprocess(CLI::App& app) {
    auto o = std::make_shared<PreprocessOptions>();
    auto* sub = app.add_subcommand("preprocess", "Apply a chain of PCA / delay-embedding steps to a CSV");
    sub->add_option("--input", o->input, "Input CSV")->required();
    sub->add_option("--out", o->out, "Output CSV")->required();
    sub->add_option("--step", o->steps, "pca=<q> or delay=<h>, applied in order (repeatable)")->required();
    sub->callback([o] { run_preprocess(*o); });
}

}  // namespace jsmcli
