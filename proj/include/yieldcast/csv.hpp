#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "yieldcast/errors.hpp"

namespace yieldcast {

// Minimal comma-separated reader for the flat schemas this project consumes.
// No quoting or escaping; none of the documented file formats need it.
// Errors carry the file path, 1-based line number, and offending field name.
class CsvReader {
public:
    explicit CsvReader(const std::filesystem::path& path) : path_(path.string()), in_(path)
    {
        if (!in_) {
            throw IoError("cannot open file: " + path_);
        }
        std::string header;
        if (!std::getline(in_, header)) {
            header_empty_ = true;
            return;
        }
        ++line_;
        if (!header.empty() && header.back() == '\r') {
            header.pop_back();
        }
        split(header, header_fields_);
        for (std::size_t i = 0; i < header_fields_.size(); ++i) {
            columns_.emplace(header_fields_[i], i);
        }
    }

    // Index of a required header column.
    [[nodiscard]] std::size_t column(std::string_view name) const
    {
        const auto it = columns_.find(std::string(name));
        if (it == columns_.end()) {
            throw SchemaError(path_ + ": missing required column '" + std::string(name) + "'");
        }
        return it->second;
    }

    [[nodiscard]] bool has_column(std::string_view name) const
    {
        return columns_.count(std::string(name)) > 0;
    }

    [[nodiscard]] std::size_t column_count() const { return columns_.size(); }
    [[nodiscard]] const std::vector<std::string>& header() const { return header_fields_; }

    // Advances to the next data row; false at end of file. Blank lines and
    // lines starting with '#' are skipped.
    bool next()
    {
        std::string row;
        while (std::getline(in_, row)) {
            ++line_;
            if (!row.empty() && row.back() == '\r') {
                row.pop_back();
            }
            if (row.empty() || row.front() == '#') {
                continue;
            }
            split(row, fields_);
            if (!header_fields_.empty() && fields_.size() != header_fields_.size()) {
                throw ParseError(where() + ": expected " + std::to_string(header_fields_.size())
                                 + " fields, got " + std::to_string(fields_.size()));
            }
            return true;
        }
        return false;
    }

    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] bool header_missing() const { return header_empty_; }

    [[nodiscard]] const std::string& str(std::size_t col, std::string_view name) const
    {
        if (col >= fields_.size()) {
            throw ParseError(where() + ": missing field '" + std::string(name) + "'");
        }
        return fields_[col];
    }

    [[nodiscard]] double real(std::size_t col, std::string_view name) const
    {
        const std::string& f = str(col, name);
        double value{};
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
        if (ec != std::errc{} || ptr != f.data() + f.size()) {
            throw ParseError(where() + ": field '" + std::string(name) + "': not a number: '" + f + "'");
        }
        return value;
    }

    [[nodiscard]] long integer(std::size_t col, std::string_view name) const
    {
        const std::string& f = str(col, name);
        long value{};
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
        if (ec != std::errc{} || ptr != f.data() + f.size()) {
            throw ParseError(where() + ": field '" + std::string(name) + "': not an integer: '" + f + "'");
        }
        return value;
    }

    [[nodiscard]] std::string where() const { return path_ + ":" + std::to_string(line_); }

private:
    static void split(const std::string& row, std::vector<std::string>& out)
    {
        out.clear();
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = row.find(',', start);
            if (comma == std::string::npos) {
                out.push_back(row.substr(start));
                break;
            }
            out.push_back(row.substr(start, comma - start));
            start = comma + 1;
        }
    }

    std::string path_;
    std::ifstream in_;
    std::size_t line_ = 0;
    bool header_empty_ = false;
    std::vector<std::string> header_fields_;
    std::vector<std::string> fields_;
    std::unordered_map<std::string, std::size_t> columns_;
};

// Full-precision decimal form that round-trips a double exactly; used for
// every serialized floating-point value so repeated runs emit identical bytes.
inline std::string fmt_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Opens an output stream or throws; parent directories must already exist.
inline std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write file: " + path.string());
    }
    return out;
}

}  // namespace yieldcast
