#include "jsmooth/dataset.hpp"

#include "jsmooth/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace jsmooth {

Dataset::Dataset(Matrix values, std::string view_id)
    : values_(std::move(values)), view_id_(std::move(view_id)) {
    if (values_.rows() < 2)
        throw DataError("dataset '" + view_id_ + "' needs at least 2 rows, got " +
                        std::to_string(values_.rows()));
    if (values_.cols() < 1) throw DataError("dataset '" + view_id_ + "' has no columns");
    if (!values_.allFinite()) throw DataError("dataset '" + view_id_ + "' contains non-finite values");
}

Dataset Dataset::select_rows(const std::vector<Index>& rows) const {
    Matrix out(static_cast<Index>(rows.size()), values_.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0 || rows[i] >= values_.rows()) throw UsageError("row index out of range");
        out.row(static_cast<Index>(i)) = values_.row(rows[i]);
    }
    return Dataset(std::move(out), view_id_);
}

void check_aligned(const std::vector<Dataset>& views) {
    for (std::size_t k = 1; k < views.size(); ++k) {
        if (views[k].rows() != views[0].rows()) {
            throw DataError("row count mismatch: view '" + views[0].view_id() + "' has " +
                            std::to_string(views[0].rows()) + " rows, view '" + views[k].view_id() +
                            "' has " + std::to_string(views[k].rows()));
        }
    }
}

// ---------------------------------------------------------------------------

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view field, double& out) {
    field = trim(field);
    if (field.empty()) return false;
    if (field.front() == '+') field.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc() && ptr == field.data() + field.size();
}

}  // namespace

bool parse_csv_row(const std::string& line, std::vector<double>& out) {
    out.clear();
    std::string_view rest = line;
    while (true) {
        const auto comma = rest.find(',');
        const auto field = rest.substr(0, comma);
        double v;
        if (!parse_double(field, v)) return false;
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return true;
}

Matrix parse_csv_matrix(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<double> row;
    std::vector<double> flat;
    Index cols = -1;
    Index rows = 0;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (!parse_csv_row(line, row)) {
            if (first_content) {
                // Header: skipped when the first non-empty line is non-numeric.
                first_content = false;
                continue;
            }
            throw DataError("malformed CSV at line " + std::to_string(line_no));
        }
        first_content = false;
        if (cols < 0) cols = static_cast<Index>(row.size());
        if (static_cast<Index>(row.size()) != cols)
            throw DataError("ragged CSV at line " + std::to_string(line_no) + ": expected " +
                            std::to_string(cols) + " fields, got " + std::to_string(row.size()));
        flat.insert(flat.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0) return Matrix(0, 0);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = flat[static_cast<std::size_t>(i * cols + j)];
    return m;
}

Matrix read_csv_matrix(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    try {
        return parse_csv_matrix(ss.str());
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string format_csv_row(const double* values, Index count) {
    std::string out;
    out.reserve(static_cast<std::size_t>(count) * 24);
    char buf[64];
    for (Index j = 0; j < count; ++j) {
        if (j) out.push_back(',');
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, values[j], std::chars_format::general, 17);
        out.append(buf, ptr);
    }
    return out;
}

void write_csv_matrix(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write '" + path.string() + "'");
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
        f << format_csv_row(row.data(), m.cols()) << '\n';
    }
    if (!f) throw DataError("write failed for '" + path.string() + "'");
}

Dataset load_dataset(const std::filesystem::path& path, std::string view_id) {
    if (view_id.empty()) view_id = path.stem().string();
    return Dataset(read_csv_matrix(path), std::move(view_id));
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
    write_csv_matrix(path, data.values());
}

void write_csv_vector(const std::filesystem::path& path, const Vector& v) {
    write_csv_matrix(path, Matrix(v));
}

Vector read_csv_vector(const std::filesystem::path& path) {
    Matrix m = read_csv_matrix(path);
    if (m.cols() != 1 && m.rows() != 1) throw DataError("'" + path.string() + "' is not a vector");
    return m.cols() == 1 ? Vector(m.col(0)) : Vector(m.row(0).transpose());
}

}  // namespace jsmooth
