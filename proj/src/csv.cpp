#include "gyrolat/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gyrolat {

std::string format_float(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

void Table::add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }

void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        os << (i ? "," : "") << csv_escape(t.header[i]);
    os << "\n";
    for (const auto& row : t.rows) {
        const std::size_t n = std::max(row.size(), t.header.size());
        for (std::size_t i = 0; i < n; ++i)
            os << (i ? "," : "") << (i < row.size() ? csv_escape(row[i]) : "");
        os << "\n";
    }
}

void write_csv_file(const std::string& path, const Table& t) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_csv(f, t);
    if (!f) throw std::runtime_error("write failed: " + path);
}

void write_plotdata(std::ostream& os, const Table& t) {
    os << "#";
    for (const auto& h : t.header) os << " " << h;
    os << "\n";
    for (const auto& row : t.rows) {
        const std::size_t n = std::max(row.size(), t.header.size());
        for (std::size_t i = 0; i < n; ++i) {
            const bool missing = i >= row.size() || row[i].empty();
            os << (i ? " " : "") << (missing ? "nan" : row[i]);
        }
        os << "\n";
    }
}

void write_plotdata_file(const std::string& path, const Table& t) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_plotdata(f, t);
    if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace gyrolat
