#include "jsmooth/serialize.hpp"

#include "jsmooth/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace jsmooth {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json params_json(const KernelParams& p) {
    return json{{"kind", to_string(p.kind)},   {"bandwidth", p.bandwidth},   {"bandwidth_factor", p.bandwidth_factor},
                {"k", p.k},                    {"delta", p.delta},           {"median_cap", p.median_cap},
                {"seed", p.seed}};
}

KernelParams params_from(const json& j) {
    KernelParams p;
    try {
        p.kind = kernel_kind_from_string(j.at("kind").get<std::string>());
        p.bandwidth = j.value("bandwidth", p.bandwidth);
        p.bandwidth_factor = j.value("bandwidth_factor", p.bandwidth_factor);
        p.k = j.value("k", p.k);
        p.delta = j.value("delta", p.delta);
        p.median_cap = j.value("median_cap", p.median_cap);
        p.seed = j.value("seed", p.seed);
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed kernel parameters: ") + e.what());
    }
    return p;
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
}

// JSON cannot hold NaN; an unset threshold is stored as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Matrix read_rows(const fs::path& path, Index rows) {
    Matrix m = read_csv_matrix(path);
    if (m.rows() != rows) throw DataError(path.string() + " has " + std::to_string(m.rows()) + " rows, expected " +
                                          std::to_string(rows));
    return m;
}

}  // namespace

std::string kernel_params_to_json(const KernelParams& params) { return params_json(params).dump(); }

KernelParams kernel_params_from_json(const std::string& text) {
    try {
        return params_from(json::parse(text));
    } catch (const json::parse_error& e) {
        throw DataError(std::string("malformed kernel parameters: ") + e.what());
    }
}

// ---------------------------------------------------------------------------

void save_basis(const fs::path& dir, const SpectralBasis& basis) {
    ensure_dir(dir);
    write_csv_vector(dir / "eigenvalues.csv", basis.eigenvalues);
    write_csv_matrix(dir / "vectors.csv", basis.vectors);
    write_json(dir / "params.json", json{{"n", basis.n()}, {"d", basis.d()}, {"kernel", params_json(basis.source)}});
}

SpectralBasis load_basis(const fs::path& dir) {
    const json meta = read_json(dir / "params.json");
    SpectralBasis basis;
    basis.source = params_from(meta.at("kernel"));
    basis.eigenvalues = read_csv_vector(dir / "eigenvalues.csv");
    basis.vectors = read_csv_matrix(dir / "vectors.csv");
    if (basis.vectors.rows() != meta.at("n").get<Index>() || basis.vectors.cols() != basis.eigenvalues.size())
        throw DataError("basis files in " + dir.string() + " disagree on shape");
    return basis;
}

// ---------------------------------------------------------------------------

std::string model_summary(const ModelBundle& bundle) {
    const JsfModel& m = bundle.model;
    std::ostringstream out;
    out << "views K = " << m.views() << ", N = " << m.n() << ", d = " << m.basis_dimension
        << ", M_max = " << m.max_functions() << '\n';
    out << "threshold E0 = ";
    if (std::isfinite(m.threshold))
        out << std::setprecision(6) << m.threshold << " (" << bundle.threshold_mode << ")";
    else
        out << "none";
    out << "\nselected M = " << m.selected << "\n\n";
    out << std::setw(5) << "i" << std::setw(14) << "sigma";
    for (Index k = 0; k < m.views(); ++k) {
        const std::string name = static_cast<std::size_t>(k) < bundle.view_ids.size() && !bundle.view_ids[k].empty()
                                     ? bundle.view_ids[static_cast<std::size_t>(k)]
                                     : "view" + std::to_string(k);
        out << std::setw(14) << ("score:" + name).substr(0, 13);
    }
    out << '\n';
    const Index rows = std::min<Index>(m.max_functions(), std::max<Index>(m.selected + 10, 20));
    out << std::fixed << std::setprecision(6);
    for (Index i = 0; i < rows; ++i) {
        out << std::setw(5) << i + 1 << std::setw(14) << m.singular_values(i);
        for (Index k = 0; k < m.views(); ++k) out << std::setw(14) << m.scores[static_cast<std::size_t>(k)](i);
        out << (i < m.selected ? "  *" : "") << '\n';
    }
    if (rows < m.max_functions()) out << "... (" << m.max_functions() - rows << " more)\n";
    return out.str();
}

void save_model(const fs::path& dir, const ModelBundle& bundle) {
    const JsfModel& m = bundle.model;
    if (static_cast<Index>(bundle.kernels.size()) != m.views() ||
        static_cast<Index>(bundle.view_ids.size()) != m.views())
        throw UsageError("model bundle needs one kernel and view id per view");
    ensure_dir(dir);
    write_csv_matrix(dir / "U.csv", m.functions);
    write_csv_vector(dir / "sigma.csv", m.singular_values);
    json views = json::array();
    json scores = json::object();
    for (Index k = 0; k < m.views(); ++k) {
        const auto sk = static_cast<std::size_t>(k);
        const std::string file = "alpha_" + std::to_string(k) + ".csv";
        write_csv_matrix(dir / file, m.coefficients[sk]);
        views.push_back({{"id", bundle.view_ids[sk]}, {"kernel", params_json(bundle.kernels[sk])}, {"alpha", file}});
        scores[bundle.view_ids[sk].empty() ? "view" + std::to_string(k) : bundle.view_ids[sk]] = to_std(m.scores[sk]);
    }
    write_json(dir / "scores.json", json{{"sigma", to_std(m.singular_values)},
                                         {"scores", scores},
                                         {"M", m.selected},
                                         {"E0", number_or_null(m.threshold)}});
    write_json(dir / "manifest.json", json{{"K", m.views()},
                                           {"N", m.n()},
                                           {"d", m.basis_dimension},
                                           {"M_max", m.max_functions()},
                                           {"M", m.selected},
                                           {"E0", number_or_null(m.threshold)},
                                           {"threshold_mode", bundle.threshold_mode},
                                           {"seed", bundle.seed},
                                           {"views", views}});
    std::ofstream(dir / "summary.txt") << model_summary(bundle);
}

ModelBundle load_model(const fs::path& dir) {
    const json manifest = read_json(dir / "manifest.json");
    ModelBundle bundle;
    JsfModel& m = bundle.model;
    try {
        const Index n = manifest.at("N").get<Index>();
        m.basis_dimension = manifest.at("d").get<Index>();
        m.selected = manifest.at("M").get<Index>();
        m.threshold = manifest.at("E0").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                  : manifest.at("E0").get<double>();
        bundle.threshold_mode = manifest.value("threshold_mode", std::string());
        bundle.seed = manifest.value("seed", std::uint64_t{0});
        m.functions = read_rows(dir / "U.csv", n);
        m.singular_values = read_csv_vector(dir / "sigma.csv");
        for (const json& v : manifest.at("views")) {
            bundle.view_ids.push_back(v.at("id").get<std::string>());
            bundle.kernels.push_back(params_from(v.at("kernel")));
            Matrix alpha = read_rows(dir / v.at("alpha").get<std::string>(), m.basis_dimension);
            m.scores.push_back(alpha.colwise().squaredNorm().transpose());
            m.coefficients.push_back(std::move(alpha));
        }
    } catch (const json::exception& e) {
        throw DataError("malformed manifest in " + dir.string() + ": " + e.what());
    }
    if (m.singular_values.size() != m.functions.cols() || manifest.at("K").get<Index>() != m.views())
        throw DataError("model files in " + dir.string() + " disagree on shape");
    return bundle;
}

// ---------------------------------------------------------------------------

void save_extender(const fs::path& dir, const ExtensionModel& extender) {
    const fs::path root = dir / "extension";
    ensure_dir(root);
    json views = json::array();
    for (Index k = 0; k < extender.views(); ++k) {
        const ExtensionView& v = extender.view(k);
        const std::string name = "view_" + std::to_string(k);
        const fs::path sub = root / name;
        ensure_dir(sub);
        write_csv_matrix(sub / "train.csv", v.train.values());
        write_csv_vector(sub / "eigenvalues.csv", v.eigenvalues);
        write_csv_matrix(sub / "alpha.csv", v.coefficients);
        write_csv_matrix(sub / "weights.csv", v.weights);
        if (v.radii.size() > 0) write_csv_vector(sub / "radii.csv", v.radii);
        views.push_back({{"dir", name},
                         {"id", v.train.view_id()},
                         {"kernel", params_json(v.params)},
                         {"retained", v.retained},
                         {"n", v.train.rows()},
                         {"p", v.train.cols()}});
    }
    write_json(root / "manifest.json", json{{"K", extender.views()}, {"M", extender.functions()}, {"views", views}});
}

ExtensionModel load_extender(const fs::path& dir) {
    const fs::path root = dir / "extension";
    const json manifest = read_json(root / "manifest.json");
    std::vector<ExtensionView> views;
    try {
        for (const json& j : manifest.at("views")) {
            const fs::path sub = root / j.at("dir").get<std::string>();
            ExtensionView v;
            v.train = Dataset(read_csv_matrix(sub / "train.csv"), j.value("id", std::string()));
            v.params = params_from(j.at("kernel"));
            v.eigenvalues = read_csv_vector(sub / "eigenvalues.csv");
            v.coefficients = read_csv_matrix(sub / "alpha.csv");
            v.weights = read_rows(sub / "weights.csv", v.train.rows());
            v.retained = j.at("retained").get<std::vector<Index>>();
            if (fs::exists(sub / "radii.csv")) v.radii = read_csv_vector(sub / "radii.csv");
            views.push_back(std::move(v));
        }
    } catch (const json::exception& e) {
        throw DataError("malformed extension manifest in " + root.string() + ": " + e.what());
    }
    return ExtensionModel(std::move(views));
}

}  // namespace jsmooth
