#include "temperflow/csv.hpp"

#include <cstdio>

#include "temperflow/errors.hpp"

namespace temperflow {

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::trunc);
  if (!out_) throw ConfigError("cannot open output file " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) {
    out_ << (i ? "," : "") << header[i];
  }
  out_ << "\n";
}

void CsvWriter::begin_row() {
  if (row_open_) throw ConfigError("CsvWriter: previous row still open");
  row_open_ = true;
  in_row_ = 0;
}

void CsvWriter::add(double v) { add(format_g17(v)); }
void CsvWriter::add(int v) { add(std::to_string(v)); }
void CsvWriter::add(long long v) { add(std::to_string(v)); }
void CsvWriter::add(std::uint64_t v) { add(std::to_string(v)); }

void CsvWriter::add(const std::string& v) {
  out_ << (in_row_ ? "," : "") << v;
  ++in_row_;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw ConfigError("CsvWriter: row width " + std::to_string(in_row_) +
                      " does not match header width " + std::to_string(columns_));
  }
  out_ << "\n";
  row_open_ = false;
}

void CsvWriter::close() {
  if (out_.is_open()) out_.close();
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot hash missing file " + path.string());
  std::uint64_t h = 0xCBF29CE484222325ull;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const auto got = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001B3ull;
    }
  }
  return h;
}

}  // namespace temperflow
