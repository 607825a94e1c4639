// Copyright 2026 The coarsekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace coarsekit {

/// Malformed input: bad parameters, unknown ids, unparsable files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A hypothesis did not hold on the finite model and the operation cannot
/// produce a value (e.g. a quotient whose orbits escape the model).
class RefutedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The lifting march could not find a fibre point within the certified step.
class StuckLiftError : public std::runtime_error {
 public:
  StuckLiftError(const std::string& what, std::size_t column, double t)
      : std::runtime_error(what), column_(column), t_(t) {}

  std::size_t column() const noexcept { return column_; }
  double t() const noexcept { return t_; }

 private:
  std::size_t column_;
  double t_;
};

}  // namespace coarsekit
