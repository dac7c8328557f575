#include "temperflow/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "temperflow/csv.hpp"
#include "temperflow/errors.hpp"

#ifndef TEMPERFLOW_VERSION
#define TEMPERFLOW_VERSION "0.0.0"
#endif

namespace temperflow {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

RunManifest make_manifest(std::uint64_t config_hash, std::uint64_t seed,
                          const std::vector<std::filesystem::path>& outputs) {
  RunManifest m;
  m.config_hash = config_hash;
  m.seed = seed;
  m.version = TEMPERFLOW_VERSION;
  for (const auto& p : outputs) {
    m.output_checksums.emplace_back(p.filename().string(), fnv1a64_file(p));
  }
  return m;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& dir) {
  nlohmann::json j;
  j["config_hash"] = hex64(manifest.config_hash);
  j["seed"] = manifest.seed;
  j["version"] = manifest.version;
  nlohmann::json outs = nlohmann::json::object();
  for (const auto& [name, sum] : manifest.output_checksums) {
    outs[name] = hex64(sum);
  }
  j["outputs"] = outs;

  std::filesystem::create_directories(dir);
  const auto tmp = dir / "manifest.json.tmp";
  const auto final_path = dir / "manifest.json";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ConfigError("cannot write manifest in " + dir.string());
    out << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, final_path);
}

}  // namespace temperflow
