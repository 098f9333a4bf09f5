#pragma once

#include <stdexcept>
#include <string>

namespace embedkit {

// Bad or missing input: unreadable files, malformed encodings, empty
// corpora, out-of-vocabulary queries. CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite loss or parameters during optimization. CLI exit code 3.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace embedkit
