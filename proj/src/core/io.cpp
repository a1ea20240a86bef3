// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include "core/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "core/errors.hpp"

namespace detfun {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : os_(path), width_(header.size()) {
  if (!os_) throw ConfigError("CsvWriter: cannot open " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    os_ << header[i] << (i + 1 < header.size() ? "," : "");
  os_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw ConfigError("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i)
    os_ << cells[i] << (i + 1 < cells.size() ? "," : "");
  os_ << "\n";
}

void CsvWriter::row_numeric(const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double c : cells) s.push_back(format_double(c));
  row(s);
}

void CsvWriter::close() { os_.close(); }

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw ConfigError("cannot create output directory " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Manifest::Manifest(std::string scenario_text)
    : scenario_hash_(fnv1a64(scenario_text)) {}

void Manifest::add(const std::string& name, const std::string& file_path) {
  entries_.emplace_back(name, fnv1a64(read_file(file_path)));
}

void Manifest::write(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write manifest " + path);
  auto entries = entries_;
  std::sort(entries.begin(), entries.end());
  os << "scenario," << hex64(scenario_hash_) << "\n";
  for (const auto& [name, hash] : entries) os << name << "," << hex64(hash) << "\n";
}

}  // namespace detfun
