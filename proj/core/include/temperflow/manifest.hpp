#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace temperflow {

// Written atomically (temp file + rename) after a successful run; records
// enough to verify byte-identical reproduction.
struct RunManifest {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::pair<std::string, std::uint64_t>> output_checksums;
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir);

RunManifest make_manifest(std::uint64_t config_hash, std::uint64_t seed,
                          const std::vector<std::filesystem::path>& outputs);

}  // namespace temperflow
