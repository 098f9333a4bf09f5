#include "embedkit/cooc.hpp"

#include "embedkit/errors.hpp"

namespace embedkit::train {

std::vector<double> CoocMatrix::marginals(std::size_t vocab_size) const {
  std::vector<double> sums(vocab_size, 0.0);
  for (const auto& [k, w] : cells_) {
    auto i = static_cast<std::uint32_t>(k >> 32);
    auto j = static_cast<std::uint32_t>(k & 0xFFFFFFFFu);
    sums[i] += w;
    if (i != j) sums[j] += w;
  }
  return sums;
}

double CoocMatrix::total() const {
  double total = 0.0;
  for (const auto& [k, w] : cells_) {
    auto i = static_cast<std::uint32_t>(k >> 32);
    auto j = static_cast<std::uint32_t>(k & 0xFFFFFFFFu);
    total += (i == j) ? w : 2.0 * w;
  }
  return total;
}

CoocMatrix build_cooccurrence(const textpipe::TokenStream& stream,
                              const vocab::Vocabulary& vocab, int ws) {
  if (ws < 1) throw DataError("window size must be >= 1");
  CoocMatrix cooc;
  std::vector<std::uint32_t> ids;
  for (const auto& sentence : stream.sentences) {
    ids.clear();
    for (const auto& token : sentence) {
      auto id = vocab.id(token);
      if (id >= 0) ids.push_back(static_cast<std::uint32_t>(id));
    }
    const std::size_t n = ids.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t hi = std::min(n, i + 1 + static_cast<std::size_t>(ws));
      for (std::size_t j = i + 1; j < hi; ++j)
        cooc.add(ids[i], ids[j], 1.0 / static_cast<double>(j - i));
    }
  }
  return cooc;
}

}  // namespace embedkit::train
