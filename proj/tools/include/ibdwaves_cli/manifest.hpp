#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace ibdwaves::cli {

std::string sha256_file(const std::filesystem::path& path);

class RunManifest {
public:
    RunManifest(std::string command, nlohmann::json parameters);

    void add_output(const std::filesystem::path& path);
    void add_failure(nlohmann::json failure);
    // Writes manifest.json next to the outputs, checksumming every listed file.
    std::filesystem::path write(const std::filesystem::path& out_dir) const;

private:
    std::string command_;
    nlohmann::json parameters_;
    std::vector<std::filesystem::path> outputs_;
    nlohmann::json failures_ = nlohmann::json::array();
    std::chrono::steady_clock::time_point start_;
};

}  // namespace ibdwaves::cli
