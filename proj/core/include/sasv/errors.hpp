// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The sasvkit Authors

#ifndef SASV_ERRORS_HPP
#define SASV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sasv {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
public:
  ParseError(const std::string &msg, long line = -1)
      : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  long line() const { return line_; }

private:
  long line_;
};

/// Violated data contract (missing class, dimension mismatch, bad value).
class DataError : public Error {
public:
  using Error::Error;
};

/// Filesystem or serialization failure.
class IoError : public Error {
public:
  using Error::Error;
};

/// Bad or inconsistent configuration, including architecture mismatches.
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace sasv

#endif
