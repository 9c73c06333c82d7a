#include <bagus/io.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

namespace bagus {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InvalidDataError("cannot open " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::ofstream open_for_write(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InvalidDataError("cannot write " + path.string());
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, const std::string& origin, std::size_t line) {
    const std::string t = trim(field);
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    // from_chars rejects a leading '+', which other writers do emit.
    if (first != last && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (t.empty() || ec != std::errc() || ptr != last) {
        std::ostringstream os;
        os << origin << ":" << line << ": not a number: '" << t << "'";
        throw ParseError(os.str());
    }
    return v;
}

void write_rows(std::ostream& out, const Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) {
                out << ',';
            }
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Matrix parse_matrix_csv(const std::string& text, const std::string& origin) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            const auto comma = t.find(',', start);
            row.push_back(parse_number(t.substr(start, comma - start), origin, lineno));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            std::ostringstream os;
            os << origin << ":" << lineno << ": expected " << rows.front().size() << " fields, found "
               << row.size();
            throw ParseError(os.str());
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ParseError(origin + ": no data rows");
    }
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return m;
}

Matrix read_matrix_csv(const fs::path& path) { return parse_matrix_csv(read_file(path), path.string()); }

void write_matrix_csv(const fs::path& path, const Matrix& m, const std::string& header) {
    auto out = open_for_write(path);
    if (!header.empty()) {
        out << "# " << header << '\n';
    }
    write_rows(out, m);
}

fs::path truth_path(const fs::path& data_path) {
    fs::path p = data_path;
    p.replace_extension();
    p += ".truth.csv";
    return p;
}

void write_dataset(const fs::path& path, const Dataset& data) {
    validate(data);
    auto out = open_for_write(path);
    out << "# bagus-dataset v1, n=" << data.n() << ", p=" << data.p() << ", seed=" << data.seed
        << ", model=" << (data.model.empty() ? "unknown" : data.model) << '\n';
    write_rows(out, data.rows);
    if (data.truth) {
        write_matrix_csv(truth_path(path), data.truth->dense());
    }
}

DatasetFile read_dataset(const fs::path& path) {
    const std::string text = read_file(path);
    DatasetFile file;
    file.data.rows = parse_matrix_csv(text, path.string());

    const std::string first = trim(text.substr(0, text.find('\n')));
    static const std::regex header(
        R"(#\s*bagus-dataset v1,\s*n=(\d+),\s*p=(\d+),\s*seed=(\d+),\s*model=([A-Za-z0-9_\-]+)\s*)");
    std::smatch m;
    if (std::regex_match(first, m, header)) {
        file.tagged = true;
        const auto n = std::stoll(m[1]);
        const auto p = std::stoll(m[2]);
        if (n != file.data.n() || p != file.data.p()) {
            std::ostringstream os;
            os << path.string() << ": header declares " << n << "x" << p << " but the file holds "
               << file.data.n() << "x" << file.data.p();
            throw ParseError(os.str());
        }
        try {
            file.data.seed = std::stoull(m[3]);
        } catch (const std::out_of_range&) {
            throw ParseError(path.string() + ": seed out of range");
        }
        file.data.model = m[4];
        file.data.generator = kGeneratorName;
        const fs::path tp = truth_path(path);
        if (fs::exists(tp)) {
            const Matrix t = read_matrix_csv(tp);
            if (t.rows() != p || t.cols() != p) {
                throw ParseError(tp.string() + ": truth matrix does not match p");
            }
            try {
                file.data.truth = SymMatrix::from_dense(t, 1e-12);
            } catch (const UsageError& e) {
                throw ParseError(tp.string() + ": " + e.what());
            }
        }
    } else if (first.rfind("# bagus-dataset", 0) == 0) {
        throw ParseError(path.string() + ": malformed bagus-dataset header");
    }
    validate(file.data);
    return file;
}

Json to_json(const MetricsReport& r) {
    Json j;
    j["fnorm"] = r.fnorm;
    j["max_norm"] = r.max_norm;
    j["spectral_err"] = r.spectral_err;
    j["sensitivity"] = r.sensitivity;
    j["specificity"] = r.specificity;
    j["mcc"] = r.mcc;
    if (r.auc) {
        j["auc"] = *r.auc;
    }
    return j;
}

Json to_json(const Summary& s) {
    Json j;
    j["mean"] = s.mean;
    j["sd"] = s.sd;
    j["count"] = s.count;
    j["formatted"] = s.formatted();
    return j;
}

Json to_json(const std::map<std::string, Summary>& summaries) {
    Json j = Json::object();
    for (const auto& [name, s] : summaries) {
        j[name] = to_json(s);
    }
    return j;
}

void write_json(const fs::path& path, const Json& doc) {
    auto out = open_for_write(path);
    out << doc.dump(2) << '\n';
}

Json read_json(const fs::path& path) {
    try {
        return Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace bagus
