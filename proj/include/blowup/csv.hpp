#pragma once

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "blowup/error.hpp"

namespace blowup::csv {

/// Shortest decimal form that round-trips to the same double.
inline std::string format(double value)
{
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

inline double parse_double(const std::string& field, const std::string& context)
{
    std::size_t begin = field.find_first_not_of(" \t\r");
    std::size_t end = field.find_last_not_of(" \t\r");
    if (begin == std::string::npos)
        throw Error(ErrorCode::Parse, "empty numeric field in " + context);
    const std::string trimmed = field.substr(begin, end - begin + 1);
    double value = 0.0;
    const auto result = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), value);
    if (result.ec != std::errc() || result.ptr != trimmed.data() + trimmed.size()) {
        // from_chars rejects "inf"/"nan" spellings and leading '+'; fall back to strtod.
        char* stop = nullptr;
        value = std::strtod(trimmed.c_str(), &stop);
        if (stop != trimmed.c_str() + trimmed.size())
            throw Error(ErrorCode::Parse, "bad number '" + trimmed + "' in " + context);
    }
    return value;
}

inline std::vector<std::string> split(const std::string& line, char sep = ',')
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep))
        fields.push_back(field);
    if (!line.empty() && line.back() == sep)
        fields.emplace_back();
    return fields;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Reads a numeric CSV. A first line that does not parse as numbers is taken
/// as the header; lines starting with '#' are skipped.
inline Table read_table(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    Table table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        auto fields = split(line);
        if (first) {
            first = false;
            try {
                (void)parse_double(fields.at(0), path.string());
            } catch (const Error&) {
                table.header = fields;
                continue;
            }
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields)
            row.push_back(parse_double(f, path.string()));
        table.rows.push_back(std::move(row));
    }
    return table;
}

/// Two-column (x, value) file, e.g. a sampled potential or initial profile.
inline std::pair<std::vector<double>, std::vector<double>> read_two_column(const std::filesystem::path& path)
{
    const Table table = read_table(path);
    std::vector<double> xs, values;
    for (const auto& row : table.rows) {
        if (row.size() < 2)
            throw Error(ErrorCode::Parse, path.string() + ": expected two columns");
        xs.push_back(row[0]);
        values.push_back(row[1]);
    }
    if (xs.size() < 2)
        throw Error(ErrorCode::Parse, path.string() + ": need at least two samples");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw Error(ErrorCode::Parse, path.string() + ": x column must be strictly increasing");
    return {std::move(xs), std::move(values)};
}

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : path_(path), out_(path)
    {
        if (!out_)
            throw Error(ErrorCode::Io, "cannot write " + path.string());
    }

    Writer& header(const std::vector<std::string>& names)
    {
        for (std::size_t i = 0; i < names.size(); ++i)
            out_ << (i ? "," : "") << names[i];
        out_ << '\n';
        return *this;
    }

    Writer& row(const std::vector<double>& values)
    {
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << (i ? "," : "") << format(values[i]);
        out_ << '\n';
        return *this;
    }

    Writer& raw(const std::string& line)
    {
        out_ << line << '\n';
        return *this;
    }

    void close()
    {
        out_.close();
        if (!out_)
            throw Error(ErrorCode::Io, "write failed for " + path_.string());
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

} // namespace blowup::csv
