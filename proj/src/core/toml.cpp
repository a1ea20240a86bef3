// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#include "core/toml.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace detfun::toml {

namespace {

std::string describe(const std::string& section, const std::string& key) {
  return section.empty() ? key : "[" + section + "] " + key;
}

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("toml: " + msg); }

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;
  int line = 1;

  bool eof() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }
  char take() {
    const char c = s[pos++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_ws_inline() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
};

Value parse_value(Cursor& cur);

Value parse_array(Cursor& cur) {
  Array arr;
  cur.take();  // '['
  for (;;) {
    cur.skip_ws_inline();
    while (!cur.eof() && (cur.peek() == '\n' || cur.peek() == '\r')) {
      cur.take();
      cur.skip_ws_inline();
    }
    if (cur.eof()) fail("unterminated array");
    if (cur.peek() == ']') {
      cur.take();
      break;
    }
    arr.push_back(parse_value(cur));
    cur.skip_ws_inline();
    while (!cur.eof() && (cur.peek() == '\n' || cur.peek() == '\r')) {
      cur.take();
      cur.skip_ws_inline();
    }
    if (cur.eof()) fail("unterminated array");
    if (cur.peek() == ',') {
      cur.take();
    } else if (cur.peek() != ']') {
      fail("expected ',' or ']' in array");
    }
  }
  return Value{std::move(arr)};
}

Value parse_value(Cursor& cur) {
  cur.skip_ws_inline();
  if (cur.eof()) fail("expected a value");
  const char c = cur.peek();
  if (c == '[') return parse_array(cur);
  if (c == '"') {
    cur.take();
    std::string out;
    while (!cur.eof() && cur.peek() != '"') {
      char ch = cur.take();
      if (ch == '\\' && !cur.eof()) {
        const char esc = cur.take();
        if (esc == 'n')
          ch = '\n';
        else if (esc == 't')
          ch = '\t';
        else
          ch = esc;
      }
      out.push_back(ch);
    }
    if (cur.eof()) fail("unterminated string");
    cur.take();
    return Value{std::move(out)};
  }
  // bare token: bool or number
  std::string tok;
  while (!cur.eof() && cur.peek() != '\n' && cur.peek() != '\r' && cur.peek() != ',' &&
         cur.peek() != ']' && cur.peek() != '#') {
    tok.push_back(cur.take());
  }
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.pop_back();
  if (tok == "true") return Value{true};
  if (tok == "false") return Value{false};
  if (tok.empty()) fail("empty value");
  const bool floaty = tok.find_first_of(".eE") != std::string::npos ||
                      tok == "inf" || tok == "-inf" || tok == "nan";
  errno = 0;
  char* end = nullptr;
  if (!floaty) {
    const long long v = std::strtoll(tok.c_str(), &end, 10);
    if (errno == 0 && end && *end == '\0') return Value{static_cast<std::int64_t>(v)};
  }
  const double d = std::strtod(tok.c_str(), &end);
  if (end && *end == '\0') return Value{d};
  fail("cannot parse value '" + tok + "'");
}

}  // namespace

const std::string& Value::as_string(const std::string& where) const {
  if (!is_string()) fail(where + ": expected a string");
  return std::get<std::string>(data);
}

std::int64_t Value::as_int(const std::string& where) const {
  if (!is_int()) fail(where + ": expected an integer");
  return std::get<std::int64_t>(data);
}

double Value::as_double(const std::string& where) const {
  if (is_int()) return static_cast<double>(std::get<std::int64_t>(data));
  if (!is_float()) fail(where + ": expected a number");
  return std::get<double>(data);
}

bool Value::as_bool(const std::string& where) const {
  if (!is_bool()) fail(where + ": expected a boolean");
  return std::get<bool>(data);
}

const Array& Value::as_array(const std::string& where) const {
  if (!is_array()) fail(where + ": expected an array");
  return std::get<Array>(data);
}

bool Table::has(const std::string& section, const std::string& key) const {
  const auto sit = sections.find(section);
  return sit != sections.end() && sit->second.count(key) > 0;
}

bool Table::has_section(const std::string& section) const {
  return sections.count(section) > 0;
}

const Value& Table::get(const std::string& section, const std::string& key) const {
  const auto sit = sections.find(section);
  if (sit == sections.end() || !sit->second.count(key))
    throw ConfigError("missing required field " + describe(section, key));
  return sit->second.at(key);
}

std::string Table::get_string(const std::string& section, const std::string& key) const {
  return get(section, key).as_string(describe(section, key));
}

std::string Table::get_string_or(const std::string& section, const std::string& key,
                                 const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

std::int64_t Table::get_int(const std::string& section, const std::string& key) const {
  return get(section, key).as_int(describe(section, key));
}

std::int64_t Table::get_int_or(const std::string& section, const std::string& key,
                               std::int64_t fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

double Table::get_double(const std::string& section, const std::string& key) const {
  return get(section, key).as_double(describe(section, key));
}

double Table::get_double_or(const std::string& section, const std::string& key,
                            double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

bool Table::get_bool_or(const std::string& section, const std::string& key,
                        bool fallback) const {
  return has(section, key) ? get(section, key).as_bool(describe(section, key)) : fallback;
}

std::vector<double> Table::get_double_array(const std::string& section,
                                            const std::string& key) const {
  const std::string where = describe(section, key);
  const Array& arr = get(section, key).as_array(where);
  std::vector<double> out;
  out.reserve(arr.size());
  for (const Value& v : arr) out.push_back(v.as_double(where));
  return out;
}

std::vector<std::vector<double>> Table::get_array_of_arrays(
    const std::string& section, const std::string& key) const {
  const std::string where = describe(section, key);
  const Array& arr = get(section, key).as_array(where);
  std::vector<std::vector<double>> out;
  out.reserve(arr.size());
  for (const Value& v : arr) {
    const Array& inner = v.as_array(where);
    std::vector<double> row;
    row.reserve(inner.size());
    for (const Value& w : inner) row.push_back(w.as_double(where));
    out.push_back(std::move(row));
  }
  return out;
}

Table parse(const std::string& text) {
  Table table;
  std::string current;
  table.sections[current];
  Cursor cur{text};
  while (!cur.eof()) {
    cur.skip_ws_inline();
    if (cur.eof()) break;
    const char c = cur.peek();
    if (c == '\n' || c == '\r') {
      cur.take();
      continue;
    }
    if (c == '#') {
      while (!cur.eof() && cur.peek() != '\n') cur.take();
      continue;
    }
    if (c == '[') {
      cur.take();
      std::string name;
      while (!cur.eof() && cur.peek() != ']') name.push_back(cur.take());
      if (cur.eof()) fail("unterminated section header");
      cur.take();
      current = name;
      table.sections[current];
      continue;
    }
    // key = value
    std::string key;
    while (!cur.eof() && (std::isalnum(static_cast<unsigned char>(cur.peek())) ||
                          cur.peek() == '_' || cur.peek() == '-'))
      key.push_back(cur.take());
    cur.skip_ws_inline();
    if (key.empty() || cur.eof() || cur.peek() != '=')
      fail("expected 'key = value' at line " + std::to_string(cur.line));
    cur.take();
    Value v = parse_value(cur);
    if (table.sections[current].count(key))
      fail("duplicate key '" + key + "' in section [" + current + "]");
    table.sections[current].emplace(key, std::move(v));
    // trailing comment / whitespace until end of line
    cur.skip_ws_inline();
    if (!cur.eof() && cur.peek() == '#')
      while (!cur.eof() && cur.peek() != '\n') cur.take();
  }
  return table;
}

Table parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

}  // namespace detfun::toml
