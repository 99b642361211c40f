#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace wechsel::cli {

// Reproducibility record written next to every output file as
// "<output>.manifest.json". Deterministic except for the timestamp field.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> options;  // resolved values
    std::vector<std::pair<std::string, std::string>> inputs;   // path -> content digest
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> stats;

    void add_option(std::string key, std::string value);
    void add_input(const std::filesystem::path& path);
    void add_stat(std::string key, std::string value);
};

// FNV-1a 64 over the file bytes, as 16 hex digits.
std::string file_digest_hex(const std::filesystem::path& path);

// Serialize and atomically place "<output>.manifest.json".
void write_manifest(const std::filesystem::path& output_file, const RunManifest& m);

// Write bytes to "<path>.tmp" then rename, so failures never leave a
// truncated output behind.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);

}  // namespace wechsel::cli
