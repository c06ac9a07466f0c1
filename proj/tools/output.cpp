#include "output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace optokerr::cli {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : width_(header.size()) {
    row(header);
}

CsvTable& CsvTable::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_)
        throw std::logic_error("csv row width does not match header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            text_ += ',';
        text_ += cells[i];
    }
    text_ += '\n';
    return *this;
}

std::string CsvTable::str() const {
    return text_;
}

void write_atomic(const std::string& dir, const std::string& name, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path folder(dir.empty() ? "." : dir);
    fs::create_directories(folder);
    const fs::path target = folder / name;
    const fs::path tmp = folder / ("." + name + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out)
            throw std::runtime_error("failed writing " + tmp.string());
    }
    fs::rename(tmp, target);
}

} // namespace optokerr::cli
