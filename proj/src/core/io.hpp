// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_IO_HPP
#define DETFUN_CORE_IO_HPP

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace detfun {

/// 17-significant-digit decimal form; strtod round-trips bit-exactly.
std::string format_double(double x);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void row_numeric(const std::vector<double>& cells);
  void close();

 private:
  std::ofstream os_;
  std::size_t width_;
};

std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t x);

void ensure_dir(const std::string& path);
std::string read_file(const std::string& path);

// Deterministic run manifest: the scenario hash plus name/hash of every
// produced file, ordered by name.
class Manifest {
 public:
  explicit Manifest(std::string scenario_text);
  void add(const std::string& name, const std::string& file_path);
  void write(const std::string& path) const;

 private:
  std::uint64_t scenario_hash_;
  std::vector<std::pair<std::string, std::uint64_t>> entries_;
};

}  // namespace detfun

#endif
