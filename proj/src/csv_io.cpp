#include "sbreak/csv_io.hpp"

#include "sbreak/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sbreak {

namespace {

constexpr std::string_view kModule = "cli";

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    s = s.substr(b, e - b);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(trim(std::string_view(line).substr(start)));
            return out;
        }
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        start = comma + 1;
    }
}

bool parse_double(const std::string& text, double& value) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = first + text.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc() && ptr == last && std::isfinite(value);
}

}  // namespace

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw Error(ErrorCode::ColumnMissing, kModule, "column '" + name + "' not found in " + path);
}

MatrixXd CsvTable::numeric_columns(const std::vector<std::string>& names) const {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& name : names) idx.push_back(column_index(name));
    MatrixXd out(static_cast<Index>(rows.size()), static_cast<Index>(names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < idx.size(); ++c) {
            double v = 0.0;
            const bool present = idx[c] < rows[r].size();
            if (!present || !parse_double(rows[r][idx[c]], v)) {
                std::ostringstream msg;
                msg << "row " << r + 1 << ", column '" << names[c] << "': "
                    << (present && !rows[r][idx[c]].empty() ? "'" + rows[r][idx[c]] + "' is not a finite number"
                                                            : std::string("missing value"));
                throw Error(ErrorCode::NonNumericCell, kModule, msg.str());
            }
            out(static_cast<Index>(r), static_cast<Index>(c)) = v;
        }
    }
    return out;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::FileNotFound, kModule, "cannot open " + path);
    CsvTable table;
    table.path = path;
    std::string line;
    bool have_header = false;
    while (std::getline(f, line)) {
        if (!have_header) {
            if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
            if (trim(line).empty()) continue;
            table.header = split_line(line);
            have_header = true;
            continue;
        }
        if (trim(line).empty()) continue;
        table.rows.push_back(split_line(line));
    }
    if (!have_header) throw Error(ErrorCode::ColumnMissing, kModule, path + " has no header row");
    return table;
}

RawSample ingest_csv(const std::string& path, const std::string& response, const std::vector<std::string>& covariates) {
    const CsvTable table = read_csv(path);
    std::vector<std::string> names{response};
    names.insert(names.end(), covariates.begin(), covariates.end());
    const MatrixXd m = table.numeric_columns(names);
    RawSample s;
    s.y = m.col(0);
    s.z = m.rightCols(m.cols() - 1);
    return s;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header, const MatrixXd& values) {
    if (static_cast<Index>(header.size()) != values.cols()) {
        throw Error(ErrorCode::InvalidConfig, kModule, "header width does not match column count");
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::FileNotFound, kModule, "cannot write " + path);
    for (std::size_t j = 0; j < header.size(); ++j) f << (j ? "," : "") << header[j];
    f << '\n';
    for (Index i = 0; i < values.rows(); ++i) {
        for (Index j = 0; j < values.cols(); ++j) f << (j ? "," : "") << format_double(values(i, j));
        f << '\n';
    }
}

void write_sample(const std::string& path, const RawSample& sample) {
    std::vector<std::string> header{"y"};
    for (Index j = 0; j < sample.k(); ++j) header.push_back("z" + std::to_string(j + 1));
    MatrixXd m(sample.n(), 1 + sample.k());
    m.col(0) = sample.y;
    if (sample.k() > 0) m.rightCols(sample.k()) = sample.z;
    write_csv(path, header, m);
}

}  // namespace sbreak
