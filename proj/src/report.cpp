#include "stokeslab/report.hpp"

#include <cstdio>

#include "stokeslab/errors.hpp"

namespace stokeslab {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header) : ncols_(header.size()) {
    os_.open(path, std::ios::binary);
    if (!os_) throw SolveFailure("cannot open " + path + " for writing");
    row(header);
}

std::string CsvWriter::escape(const std::string& cell) {
    if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != ncols_) throw DimensionMismatch("CSV row width mismatch");
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) os_ << ',';
        os_ << escape(cells[i]);
    }
    os_ << "\r\n";
}

std::string CsvWriter::num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string CsvWriter::num(int v) { return std::to_string(v); }

}  // namespace stokeslab
