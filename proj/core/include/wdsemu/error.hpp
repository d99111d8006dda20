#pragma once

#include <stdexcept>
#include <string>

namespace wdsemu {

/// Malformed or inconsistent input data (files, dimensions, topology).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed (non-convergence, singular system, NaN).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wdsemu
