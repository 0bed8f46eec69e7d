// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace csiauth {

/// Bad flags, bad call arguments, single-class metric inputs. CLI exit code 2.
class UsageError : public std::runtime_error {
  public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Missing, malformed or truncated input files. CLI exit code 3.
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite values in a numeric pipeline (training divergence etc). CLI exit code 4.
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace csiauth
