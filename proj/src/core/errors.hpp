// Copyright 2026 the detfun authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DETFUN_CORE_ERRORS_HPP
#define DETFUN_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace detfun {

// Error categories map one-to-one onto CLI exit codes and C API status
// values: 2 = bad configuration/input, 3 = condition gate failed,
// 4 = numerical failure (NaN, overflow, refused estimate).
enum class ErrorCode : int {
  generic = 1,
  config = 2,
  gate = 3,
  numeric = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCode::config, what) {}
};

struct GateError : Error {
  explicit GateError(const std::string& what) : Error(ErrorCode::gate, what) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorCode::numeric, what) {}
};

}  // namespace detfun

#endif
