#pragma once

#include <stdexcept>
#include <string>

namespace hyperspace {

// A caller-supplied parameter is out of range or inconsistent (ndims, k,
// perplexity, option combinations). The CLI reports these with exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The data itself cannot be processed: parse failures, missing entries where
// none are allowed, degenerate geometry, shape mismatches. Exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hyperspace
