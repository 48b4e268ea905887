#pragma once

#include "jsmooth/extension.hpp"
#include "jsmooth/jsf.hpp"
#include "jsmooth/kernels.hpp"
#include "jsmooth/spectral.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace jsmooth {

std::string kernel_params_to_json(const KernelParams& params);
KernelParams kernel_params_from_json(const std::string& text);

/// Directory with eigenvalues.csv, vectors.csv and params.json.
void save_basis(const std::filesystem::path& dir, const SpectralBasis& basis);
SpectralBasis load_basis(const std::filesystem::path& dir);

/// A fitted model together with the provenance the manifest records.
struct ModelBundle {
    JsfModel model;
    std::vector<std::string> view_ids;
    std::vector<KernelParams> kernels;  // resolved, one per view
    std::string threshold_mode;         // "analytic", "jackstraw" or "" (none)
    std::uint64_t seed = 0;
};

/// Writes U.csv, sigma.csv, alpha_<k>.csv, scores.json, manifest.json and a
/// human-readable summary.txt.
void save_model(const std::filesystem::path& dir, const ModelBundle& bundle);
ModelBundle load_model(const std::filesystem::path& dir);

/// Writes the extension state under dir/extension/view_<k>/.
void save_extender(const std::filesystem::path& dir, const ExtensionModel& extender);
ExtensionModel load_extender(const std::filesystem::path& dir);

/// Plain-text report: sigma, per-view scores, M and E_0.
std::string model_summary(const ModelBundle& bundle);

}  // namespace jsmooth
