#include "run_config.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace jsmcli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ConfigError(1, "unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string to_json(const RunConfig& c) {
    json views = json::array();
    for (const auto& v : c.views) views.push_back({{"path", v.path}, {"id", v.id}});
    const json j = {
        {"views", views},
        {"kernel",
         {{"kind", c.kernel.kind},
          {"bandwidth", c.kernel.bandwidth},
          {"bandwidth_factor", c.kernel.bandwidth_factor},
          {"k", c.kernel.k},
          {"delta", c.kernel.delta}}},
        {"d", c.d},
        {"m_max", c.m_max},
        {"threshold",
         {{"mode", c.threshold.mode}, {"permutations", c.threshold.permutations}, {"rebuild", c.threshold.rebuild}}},
        {"eigensolver", c.eigensolver},
        {"extension_cutoff", c.extension_cutoff},
        {"seed", c.seed},
        {"output_dir", c.output_dir},
    };
    return j.dump(2);
}

RunConfig run_config_from_json(const std::string& text) {
    RunConfig c;
    try {
        const json j = json::parse(text);
        if (!j.is_object()) throw ConfigError(2, "config must be a JSON object");
        reject_unknown(j,
                       {"views", "kernel", "d", "m_max", "threshold", "eigensolver", "extension_cutoff", "seed",
                        "output_dir"},
                       "config");
        if (j.contains("views")) {
            for (const json& v : j.at("views")) {
                ViewConfig view;
                if (v.is_string()) {
                    view.path = v.get<std::string>();
                } else {
                    reject_unknown(v, {"path", "id"}, "view");
                    view.path = v.at("path").get<std::string>();
                    read(v, "id", view.id);
                }
                c.views.push_back(view);
            }
        }
        if (j.contains("kernel")) {
            const json& k = j.at("kernel");
            reject_unknown(k, {"kind", "bandwidth", "bandwidth_factor", "k", "delta"}, "kernel");
            read(k, "kind", c.kernel.kind);
            read(k, "bandwidth", c.kernel.bandwidth);
            read(k, "bandwidth_factor", c.kernel.bandwidth_factor);
            read(k, "k", c.kernel.k);
            read(k, "delta", c.kernel.delta);
        }
        if (j.contains("threshold")) {
            const json& t = j.at("threshold");
            reject_unknown(t, {"mode", "permutations", "rebuild"}, "threshold");
            read(t, "mode", c.threshold.mode);
            read(t, "permutations", c.threshold.permutations);
            read(t, "rebuild", c.threshold.rebuild);
        }
        read(j, "d", c.d);
        read(j, "m_max", c.m_max);
        read(j, "eigensolver", c.eigensolver);
        read(j, "extension_cutoff", c.extension_cutoff);
        read(j, "seed", c.seed);
        read(j, "output_dir", c.output_dir);
    } catch (const json::exception& e) {
        throw ConfigError(2, std::string("malformed config: ") + e.what());
    }
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(2, "cannot open config " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return run_config_from_json(buffer.str());
}

void save_run_config(const RunConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError(2, "cannot write config " + path);
    out << to_json(config) << '\n';
}

void validate(const RunConfig& c, bool check_paths) {
    if (c.views.size() < 2)
        throw ConfigError(1, "fit needs at least 2 views, got " + std::to_string(c.views.size()));
    if (c.kernel.kind != "gaussian" && c.kernel.kind != "knn")
        throw ConfigError(1, "kernel kind must be 'gaussian' or 'knn', got '" + c.kernel.kind + "'");
    if (c.kernel.kind == "knn" && (c.kernel.k < 1 || !(c.kernel.delta > 0.0)))
        throw ConfigError(1, "knn kernel needs k >= 1 and delta > 0");
    if (c.kernel.kind == "gaussian" && !(c.kernel.bandwidth > 0.0) && !(c.kernel.bandwidth_factor > 0.0))
        throw ConfigError(1, "gaussian kernel needs a positive bandwidth or bandwidth_factor");
    if (c.d < 0 || c.m_max < 0) throw ConfigError(1, "d and m_max must be non-negative");
    if (c.threshold.mode != "analytic" && c.threshold.mode != "jackstraw" && c.threshold.mode != "none")
        throw ConfigError(1, "threshold mode must be analytic, jackstraw or none");
    if (c.threshold.mode == "jackstraw" && c.threshold.permutations < 1)
        throw ConfigError(1, "jackstraw needs at least one permutation");
    if (c.eigensolver != "auto" && c.eigensolver != "lanczos" && c.eigensolver != "dense")
        throw ConfigError(1, "eigensolver must be auto, lanczos or dense");
    if (!(c.extension_cutoff > 0.0) || c.extension_cutoff >= 1.0)
        throw ConfigError(1, "extension_cutoff must lie in (0, 1)");
    if (c.output_dir.empty()) throw ConfigError(1, "output_dir must not be empty");
    if (check_paths)
        for (const auto& v : c.views)
            if (!std::filesystem::is_regular_file(v.path)) throw ConfigError(2, "view file not found: " + v.path);
}

}  // namespace jsmcli
