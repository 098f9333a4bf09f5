#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "embedkit/textpipe.hpp"
#include "embedkit/vocab.hpp"

namespace embedkit::train {

// Sparse symmetric co-occurrence counts; each unordered pair is stored
// once under (min, max).
class CoocMatrix {
 public:
  static std::uint64_t key(std::uint32_t i, std::uint32_t j) {
    if (i > j) std::swap(i, j);
    return (static_cast<std::uint64_t>(i) << 32) | j;
  }

  void add(std::uint32_t i, std::uint32_t j, double w) { cells_[key(i, j)] += w; }

  double get(std::uint32_t i, std::uint32_t j) const {
    auto it = cells_.find(key(i, j));
    return it == cells_.end() ? 0.0 : it->second;
  }

  bool empty() const { return cells_.empty(); }
  std::size_t size() const { return cells_.size(); }

  const std::unordered_map<std::uint64_t, double>& cells() const {
    return cells_;
  }

  // Row sums of the implied full symmetric matrix (diagonal counted once).
  std::vector<double> marginals(std::size_t vocab_size) const;

  // Grand total of the full symmetric matrix.
  double total() const;

 private:
  std::unordered_map<std::uint64_t, double> cells_;
};

// Harmonic context counting: every in-window pair at distance d adds 1/d.
// Out-of-vocabulary tokens are removed before distances are measured, so
// deletions shrink distances. Windows never cross sentence boundaries.
CoocMatrix build_cooccurrence(const textpipe::TokenStream& stream,
                              const vocab::Vocabulary& vocab, int ws);

}  // namespace embedkit::train
