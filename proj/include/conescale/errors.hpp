// conescale - normalization of factorizations over convex cones
// Copyright 2026 The conescale Authors
// Licensed under Apache 2.0

#pragma once

#include <stdexcept>
#include <string>

namespace conescale {

// Violated preconditions (bad dimensions, hypothesis failures, schema
// violations).  Mapped to CLI exit code 2.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine ran out of iterations or an eigendecomposition failed.
// Mapped to CLI exit code 3.  Carries the best value seen so far when the
// caller can make use of it.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what, double best_value = 0.0)
      : std::runtime_error(what), best_value_(best_value) {}
  double best_value() const { return best_value_; }

 private:
  double best_value_;
};

// Malformed input files.  Mapped to CLI exit code 1.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace conescale
