#include "manifest.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include <wechsel/error.hpp>
#include <wechsel/version.hpp>

namespace wechsel::cli {

void RunManifest::add_option(std::string key, std::string value) {
    options.emplace_back(std::move(key), std::move(value));
}

void RunManifest::add_input(const std::filesystem::path& path) {
    inputs.emplace_back(path.string(), file_digest_hex(path));
}

void RunManifest::add_stat(std::string key, std::string value) {
    stats.emplace_back(std::move(key), std::move(value));
}

std::string file_digest_hex(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "' for hashing");

    std::uint64_t h = 14695981039346656037ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }

    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ParseError("cannot open '" + tmp + "' for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw ParseError("failed writing '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

void write_manifest(const std::filesystem::path& output_file, const RunManifest& m) {
    nlohmann::ordered_json j;
    j["command"] = m.command;

    nlohmann::ordered_json opts = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.options) opts[k] = v;
    j["options"] = opts;

    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const auto& [p, digest] : m.inputs) inputs[p] = digest;
    j["inputs"] = inputs;

    j["seed"] = m.seed;

    nlohmann::ordered_json stats = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.stats) stats[k] = v;
    j["stats"] = stats;

    j["version"] = std::string(kVersion);

    const auto now = std::chrono::system_clock::now();
    j["timestamp"] = std::format("{:%FT%TZ}", std::chrono::floor<std::chrono::seconds>(now));

    atomic_write(output_file.string() + ".manifest.json", j.dump(2) + "\n");
}

}  // namespace wechsel::cli
