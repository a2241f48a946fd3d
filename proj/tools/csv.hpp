#ifndef MSCALE_TOOLS_CSV_HPP
#define MSCALE_TOOLS_CSV_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace csvio {

struct Table {
    std::vector<std::string> header;            // empty when the file had none
    std::vector<std::vector<double>> columns;   // column-major
    std::vector<std::string> metadata;          // '#'-prefixed lines, kept verbatim

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline bool parse_double(const std::string& tok, double& out) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    return end != begin && end && *end == '\0';
}

/// Reads a comma-separated table. A first row with any non-numeric field is
/// taken as a header; '#' lines are collected as metadata.
inline Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    Table t;
    std::string line;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.metadata.push_back(line);
            continue;
        }
        const std::vector<std::string> fields = split_fields(line);
        std::vector<double> vals(fields.size());
        bool numeric = true;
        for (std::size_t i = 0; i < fields.size(); ++i)
            if (!parse_double(fields[i], vals[i])) numeric = false;
        if (first_data_line) {
            first_data_line = false;
            if (!numeric) {
                t.header = fields;
                continue;
            }
            t.columns.resize(fields.size());
        }
        if (!numeric) throw std::runtime_error("non-numeric row in '" + path + "': " + line);
        if (t.columns.empty()) t.columns.resize(fields.size());
        if (vals.size() != t.columns.size())
            throw std::runtime_error("ragged row in '" + path + "': " + line);
        for (std::size_t i = 0; i < vals.size(); ++i) t.columns[i].push_back(vals[i]);
    }
    if (t.columns.empty() || t.columns.front().empty())
        throw std::runtime_error("'" + path + "' holds no data rows");
    return t;
}

/// Data column conventions: one column is y on the implied grid, two
/// columns are (t, y), and the t values are informational only.
inline std::vector<double> read_observations(const std::string& path) {
    const Table t = read_table(path);
    if (t.columns.size() == 1) return t.columns[0];
    if (t.columns.size() == 2) return t.columns[1];
    throw std::runtime_error("'" + path + "' should have one (y) or two (t,y) columns");
}

inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline void write_table(const std::string& path, const std::vector<std::string>& header,
                        const std::vector<const std::vector<double>*>& columns,
                        const std::vector<std::string>& metadata = {}) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    for (const std::string& m : metadata) out << (m.rfind('#', 0) == 0 ? "" : "# ") << m << '\n';
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    if (!header.empty()) out << '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front()->size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << format_value((*columns[c])[r]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("short write on '" + path + "'");
}

}  // namespace csvio

#endif
