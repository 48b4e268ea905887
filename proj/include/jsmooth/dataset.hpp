#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace jsmooth {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// One view of the data: rows are observations, columns ambient coordinates.
/// Rows of different views with the same index refer to the same sample.
class Dataset {
public:
    Dataset() = default;

    /// Validates N >= 2 and finiteness; throws DataError otherwise.
    explicit Dataset(Matrix values, std::string view_id = {});

    const Matrix& values() const noexcept { return values_; }
    const std::string& view_id() const noexcept { return view_id_; }
    Index rows() const noexcept { return values_.rows(); }
    Index cols() const noexcept { return values_.cols(); }

    /// Rows selected by index, in the given order.
    Dataset select_rows(const std::vector<Index>& rows) const;

private:
    Matrix values_;
    std::string view_id_;
};

/// Throws DataError naming the offending views when row counts differ.
void check_aligned(const std::vector<Dataset>& views);

// ---------------------------------------------------------------------------
// CSV: one row per line, comma separated, optional non-numeric header line.
// ---------------------------------------------------------------------------

Matrix read_csv_matrix(const std::filesystem::path& path);
Matrix parse_csv_matrix(const std::string& text);

/// Parses one CSV line of doubles. Returns false (and leaves `out` unspecified)
/// on malformed input.
bool parse_csv_row(const std::string& line, std::vector<double>& out);

/// Writes with 17 significant digits so values round-trip bit-exact.
void write_csv_matrix(const std::filesystem::path& path, const Matrix& m);
std::string format_csv_row(const double* values, Index count);

Dataset load_dataset(const std::filesystem::path& path, std::string view_id = {});
void save_dataset(const std::filesystem::path& path, const Dataset& data);

void write_csv_vector(const std::filesystem::path& path, const Vector& v);
Vector read_csv_vector(const std::filesystem::path& path);

}  // namespace jsmooth
