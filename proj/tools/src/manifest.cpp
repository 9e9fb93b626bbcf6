#include "ibdwaves_cli/manifest.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>

#include <openssl/evp.h>

#include "ibdwaves/version.hpp"

namespace ibdwaves::cli {

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::string hex;
    char two[3];
    for (unsigned int k = 0; k < len; ++k) {
        std::snprintf(two, sizeof two, "%02x", md[k]);
        hex += two;
    }
    return hex;
}

RunManifest::RunManifest(std::string command, nlohmann::json parameters)
    : command_(std::move(command)), parameters_(std::move(parameters)), start_(std::chrono::steady_clock::now()) {}

void RunManifest::add_output(const std::filesystem::path& path) { outputs_.push_back(path); }

void RunManifest::add_failure(nlohmann::json failure) { failures_.push_back(std::move(failure)); }

std::filesystem::path RunManifest::write(const std::filesystem::path& out_dir) const {
    nlohmann::json j;
    j["command"] = command_;
    j["parameters"] = parameters_;
    j["version"] = kVersion;
    j["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    j["outputs"] = nlohmann::json::array();
    for (const auto& p : outputs_) {
        j["outputs"].push_back({{"file", p.filename().string()}, {"sha256", sha256_file(p)}});
    }
    j["failures"] = failures_;
    const auto path = out_dir / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
    return path;
}

}  // namespace ibdwaves::cli
