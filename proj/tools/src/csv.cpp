#include "ibdwaves_cli/csv.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace ibdwaves::cli {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary), width_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path.string());
    for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
    if (cells.size() != width_) throw std::logic_error("CSV row width mismatch in " + path_.string());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) out_ << ',';
        if (const auto* d = std::get_if<double>(&cells[k])) {
            out_ << format_number(*d);
        } else {
            out_ << std::get<std::string>(cells[k]);
        }
    }
    out_ << '\n';
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == name) return k;
    }
    throw std::out_of_range("no column " + name);
}

namespace {
std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}
}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) return t;
    t.header = split(line);
    while (std::getline(in, line)) {
        if (!line.empty()) t.rows.push_back(split(line));
    }
    return t;
}

}  // namespace ibdwaves::cli
