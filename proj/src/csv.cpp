#include "tcverify/csv.hpp"

#include <cstdio>
#include <cstdlib>

#include "tcverify/errors.hpp"

namespace tcverify {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string::size_type start = 0;
    while (true) {
        auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r')
        out.back().pop_back();
    return out;
}

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.13g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt_real(*v) : std::string();
}

CsvReader::CsvReader(std::istream& in, std::string source_name)
    : in_(in), source_(std::move(source_name)) {
    std::string line;
    if (!std::getline(in_, line))
        throw SchemaError(source_ + ": empty file (header required)");
    auto fields = split_csv_line(line);
    for (std::size_t i = 0; i < fields.size(); ++i)
        columns_[fields[i]] = i;
    n_columns_ = fields.size();
}

std::optional<std::size_t> CsvReader::column(const std::string& name) const {
    auto it = columns_.find(name);
    if (it == columns_.end()) return std::nullopt;
    return it->second;
}

std::size_t CsvReader::require_column(const std::string& name) const {
    auto c = column(name);
    if (!c)
        throw SchemaError(source_ + ": missing required column '" + name + "'");
    return *c;
}

bool CsvReader::next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
        ++row_;
        if (line.empty() || line == "\r") continue;
        fields = split_csv_line(line);
        if (fields.size() != n_columns_)
            throw SchemaError(source_ + " row " + std::to_string(row_) + ": expected " +
                              std::to_string(n_columns_) + " fields, got " +
                              std::to_string(fields.size()));
        return true;
    }
    return false;
}

double CsvReader::parse_real(const std::vector<std::string>& fields, std::size_t col,
                             const std::string& name) const {
    const std::string& s = fields[col];
    if (s.empty())
        throw SchemaError(source_ + " row " + std::to_string(row_) + ": column '" + name +
                          "' must not be empty");
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        throw SchemaError(source_ + " row " + std::to_string(row_) + ": column '" + name +
                          "' is not a number: '" + s + "'");
    return v;
}

std::optional<double> CsvReader::parse_opt_real(const std::vector<std::string>& fields,
                                                std::size_t col, const std::string& name) const {
    if (fields[col].empty()) return std::nullopt;
    return parse_real(fields, col, name);
}

long CsvReader::parse_int(const std::vector<std::string>& fields, std::size_t col,
                          const std::string& name) const {
    const std::string& s = fields[col];
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size())
        throw SchemaError(source_ + " row " + std::to_string(row_) + ": column '" + name +
                          "' is not an integer: '" + s + "'");
    return v;
}

} // namespace tcverify
