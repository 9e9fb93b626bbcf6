#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ibdwaves::cli {

struct PlotSpec {
    std::string title;
    std::string x_col;
    std::vector<std::string> y_cols;
    std::vector<std::string> group_cols;  // one polyline per distinct combination
    std::string x_label;
    std::string y_label;
    bool markers = false;
    bool legend = true;
    std::size_t max_groups = 0;  // when nonzero, thin evenly to at most this many series
};

// Plots are drawn from the CSV on disk only.
void plot_csv(const std::filesystem::path& csv, const std::filesystem::path& svg, const PlotSpec& spec);

}  // namespace ibdwaves::cli
