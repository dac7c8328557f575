#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace temperflow {

// CSV writer with a fixed header and 17-significant-digit decimals so that
// rows round-trip losslessly.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void begin_row();
  void add(double v);
  void add(int v);
  void add(long long v);
  void add(std::uint64_t v);
  void add(const std::string& v);
  void end_row();
  void close();

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t in_row_ = 0;
  bool row_open_ = false;
};

std::string format_g17(double v);

// FNV-1a over a byte buffer / file, used for config hashes and the manifest
// output checksums.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

}  // namespace temperflow
