#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gyrolat {

// 17 significant digits: every double round-trips bit-exactly.
std::string format_float(double v);

std::string csv_escape(const std::string& s);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // ragged rows allowed

    void add_row(std::vector<std::string> cells);
};

// RFC-4180-style CSV; ragged rows are padded with empty fields to the header
// width.
void write_csv(std::ostream& os, const Table& t);
void write_csv_file(const std::string& path, const Table& t);

// Whitespace-separated table for plotting tools; header as a comment line,
// missing fields as "nan".
void write_plotdata(std::ostream& os, const Table& t);
void write_plotdata_file(const std::string& path, const Table& t);

}  // namespace gyrolat
