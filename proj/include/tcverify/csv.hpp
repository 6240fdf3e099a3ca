#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tcverify {

/// Split one CSV line on commas. The canonical schemas never quote fields,
/// so no quote handling is needed or attempted.
std::vector<std::string> split_csv_line(const std::string& line);

/// Canonical float formatting for data CSVs: %.13g keeps round-trips within
/// 1e-9 absolute over the value ranges used here and prints integers bare.
std::string fmt_real(double v);

/// Optional-aware variant; empty field encodes MISSING/UNDEFINED.
std::string fmt_opt(const std::optional<double>& v);

/// Header-indexed row reader over a CSV stream. Row numbers are 1-based
/// counting the header, so error messages match what an editor shows.
class CsvReader {
public:
    CsvReader(std::istream& in, std::string source_name);

    /// Column index by name; empty when absent.
    std::optional<std::size_t> column(const std::string& name) const;

    /// Column index, throwing SchemaError naming the column when absent.
    std::size_t require_column(const std::string& name) const;

    /// Read the next data row. Returns false at end of stream.
    bool next(std::vector<std::string>& fields);

    std::size_t row_number() const { return row_; }
    const std::string& source() const { return source_; }

    /// Parse helpers; throw SchemaError naming source/row/column.
    double parse_real(const std::vector<std::string>& fields, std::size_t col,
                      const std::string& name) const;
    std::optional<double> parse_opt_real(const std::vector<std::string>& fields, std::size_t col,
                                         const std::string& name) const;
    long parse_int(const std::vector<std::string>& fields, std::size_t col,
                   const std::string& name) const;

private:
    std::istream& in_;
    std::string source_;
    std::map<std::string, std::size_t> columns_;
    std::size_t n_columns_ = 0;
    std::size_t row_ = 1;
};

} // namespace tcverify
