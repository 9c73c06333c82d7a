#pragma once

// File formats shared by the CLI and the tests.
//
// Matrices are comma-separated rows of %.17g values; lines starting with '#'
// and blank lines are skipped on input. A dataset file is a matrix whose first
// line is `# bagus-dataset v1, n=<n>, p=<p>, seed=<seed>, model=<model>`; its
// truth matrix, when present, sits next to it as `<name>.truth.csv`.

#include <bagus/evaluation.hpp>
#include <bagus/matrix.hpp>
#include <bagus/simulation.hpp>

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>

namespace bagus {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "bagus/v1";

/// %.17g; round-trips every finite double.
std::string format_double(double v);

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m, const std::string& header = {});
Matrix read_matrix_csv(const std::filesystem::path& path);

/// Parses CSV text; `origin` names the source in error messages.
Matrix parse_matrix_csv(const std::string& text, const std::string& origin = "<input>");

/// `<dir>/<stem>.truth.csv` for `<dir>/<stem>.csv`.
std::filesystem::path truth_path(const std::filesystem::path& data_path);

struct DatasetFile {
    Dataset data;
    /// True when the file carried the bagus-dataset header.
    bool tagged = false;
};

/// Writes the header line, the rows, and the truth file if data.truth is set.
void write_dataset(const std::filesystem::path& path, const Dataset& data);

/// Reads either a tagged dataset (header fields checked against the rows,
/// truth loaded when its file exists) or a plain headerless numeric CSV.
DatasetFile read_dataset(const std::filesystem::path& path);

Json to_json(const MetricsReport& r);
Json to_json(const Summary& s);

/// {"name": {"mean": .., "sd": .., "count": .., "formatted": ..}, ...}
Json to_json(const std::map<std::string, Summary>& summaries);

/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& doc);
Json read_json(const std::filesystem::path& path);

} // namespace bagus
