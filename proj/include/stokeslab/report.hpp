#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace stokeslab {

// RFC-4180 CSV emitter: header row, CRLF line ends, '.' decimal separator,
// doubles at full round-trip precision so repeated runs are byte-identical.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& cells);

    static std::string num(double v);
    static std::string num(int v);

private:
    std::ofstream os_;
    size_t ncols_ = 0;
    static std::string escape(const std::string& cell);
};

}  // namespace stokeslab
