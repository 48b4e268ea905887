#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace jsmcli {

/// Thrown for invalid configurations; `code` is the CLI exit status.
struct ConfigError : std::runtime_error {
    ConfigError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
    int code;
};

struct ViewConfig {
    std::string path;
    std::string id;  // defaults to the file stem
    bool operator==(const ViewConfig&) const = default;
};

struct KernelConfig {
    std::string kind = "gaussian";  // gaussian | knn
    double bandwidth = 0.0;         // <= 0: bandwidth_factor x median distance
    double bandwidth_factor = 0.3;
    std::int64_t k = 25;
    double delta = 1.0;
    bool operator==(const KernelConfig&) const = default;
};

struct ThresholdConfig {
    std::string mode = "jackstraw";  // analytic | jackstraw | none
    int permutations = 5;
    bool rebuild = false;  // jackstraw: rebuild the y kernel per trial
    bool operator==(const ThresholdConfig&) const = default;
};

struct RunConfig {
    std::vector<ViewConfig> views;
    KernelConfig kernel;
    std::int64_t d = 0;      // 0: N/4 capped at 2000
    std::int64_t m_max = 0;  // 0: min(K d, 512)
    ThresholdConfig threshold;
    std::string eigensolver = "auto";  // auto | lanczos | dense
    double extension_cutoff = 1e-8;
    std::uint64_t seed = 0;
    std::string output_dir = "jsm_out";
    bool operator==(const RunConfig&) const = default;
};

std::string to_json(const RunConfig& config);
/// Unknown keys are rejected so typos do not silently fall back to defaults.
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::string& path);
void save_run_config(const RunConfig& config, const std::string& path);

/// Value checks plus, when `check_paths` is set, existence of every input.
void validate(const RunConfig& config, bool check_paths);

}  // namespace jsmcli
