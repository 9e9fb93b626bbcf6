#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace ibdwaves::cli {

// %.17g, so the same double always prints the same bytes.
std::string format_number(double v);

using Cell = std::variant<double, std::string>;

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<Cell>& cells);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t width_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;  // throws when absent
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace ibdwaves::cli
