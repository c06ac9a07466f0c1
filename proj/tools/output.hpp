#pragma once

#include <string>
#include <vector>

namespace optokerr::cli {

// %.17g: round-trips every double.
std::string fmt(double v);

// Comma-separated table with a one-line header.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    CsvTable& row(const std::vector<std::string>& cells);
    std::string str() const;

private:
    std::string text_;
    std::size_t width_;
};

// Writes via a temporary file in the same directory and renames it into place.
void write_atomic(const std::string& dir, const std::string& name, const std::string& content);

} // namespace optokerr::cli
