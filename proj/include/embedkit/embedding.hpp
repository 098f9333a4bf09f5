#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "embedkit/matrix.hpp"

namespace embedkit {

// Exported word vectors: one row per token. The common currency between
// training, evaluation and projection.
struct Embedding {
  std::vector<std::string> tokens;
  Matrix vectors;
  std::unordered_map<std::string, std::uint32_t> index;

  std::size_t size() const { return tokens.size(); }
  std::size_t dim() const { return vectors.cols(); }

  void build_index() {
    index.clear();
    index.reserve(tokens.size());
    for (std::uint32_t i = 0; i < tokens.size(); ++i) index.emplace(tokens[i], i);
  }

  std::int64_t id(std::string_view token) const {
    auto it = index.find(std::string(token));
    return it == index.end() ? -1 : static_cast<std::int64_t>(it->second);
  }
};

}  // namespace embedkit
