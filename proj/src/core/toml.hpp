// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_TOML_HPP
#define DETFUN_CORE_TOML_HPP

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace detfun::toml {

// Minimal TOML subset used by scenario files: [table] headers, bare keys,
// strings, integers, floats, booleans, and (nested) arrays. Line comments
// with '#'. No dotted keys, no inline tables, no multi-line strings.

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<std::string, std::int64_t, double, bool, Array> data;

  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_float() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }

  const std::string& as_string(const std::string& where) const;
  std::int64_t as_int(const std::string& where) const;
  double as_double(const std::string& where) const;  // accepts ints
  bool as_bool(const std::string& where) const;
  const Array& as_array(const std::string& where) const;
};

class Table {
 public:
  using Section = std::map<std::string, Value>;

  bool has(const std::string& section, const std::string& key) const;
  const Value& get(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key) const;
  std::int64_t get_int_or(const std::string& section, const std::string& key,
                          std::int64_t fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key,
                   bool fallback) const;
  std::vector<double> get_double_array(const std::string& section,
                                       const std::string& key) const;
  /// Array of fixed-width numeric arrays (e.g. mode lists).
  std::vector<std::vector<double>> get_array_of_arrays(const std::string& section,
                                                       const std::string& key) const;

  bool has_section(const std::string& section) const;

  std::map<std::string, Section> sections;
};

Table parse(const std::string& text);
Table parse_file(const std::string& path);

}  // namespace detfun::toml

#endif
