#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "embedkit/rng.hpp"
#include "embedkit/textpipe.hpp"

namespace embedkit::vocab {

// Training vocabulary. Ids are dense, ordered by descending count with
// lexicographic tie-break, so builds are deterministic.
struct Vocabulary {
  std::vector<std::string> tokens;       // id -> token
  std::vector<std::uint64_t> counts;     // id -> occurrence count
  std::vector<double> discard_prob;      // id -> sub-sampling discard prob
  std::uint64_t total_tokens = 0;        // post-deletion occurrence total
  std::unordered_map<std::string, std::uint32_t> id_of;

  std::size_t size() const { return tokens.size(); }

  // -1 when out of vocabulary.
  std::int64_t id(std::string_view token) const {
    auto it = id_of.find(std::string(token));
    return it == id_of.end() ? -1 : static_cast<std::int64_t>(it->second);
  }
};

// Counts tokens, deletes those with count < minw, trims to max_vocab if
// set, and computes discard probabilities clamp(1 - sqrt(t / f), 0, 1).
// Throws DataError when nothing survives.
Vocabulary build_vocab(const textpipe::TokenStream& stream, std::uint64_t minw,
                       std::optional<std::size_t> max_vocab, double t);

// All character n-grams of the '<'-'>' wrapped word, lengths minn..maxn,
// enumerated by length then position; the whole wrapped word is appended
// when the length loop did not already produce it.
std::vector<std::string> char_ngrams(std::string_view word, int minn, int maxn);

// Bounded n-gram index: FNV-1a (32-bit) folded modulo n_buckets.
struct SubwordIndex {
  int minn = 2;
  int maxn = 7;
  std::uint32_t n_buckets = 2'000'000;

  bool enabled() const { return maxn >= minn && n_buckets > 0; }
};

std::uint32_t hash_ngram(std::string_view ngram, const SubwordIndex& index);

// Huffman code for one word: path of internal-node ids from the root down
// to the leaf's parent, with the branch bit taken at each node.
struct HuffmanCode {
  std::vector<std::uint32_t> path;  // internal-node ids in [0, V-1)
  std::vector<std::uint8_t> bits;   // 0 = left, 1 = right
};

struct HuffmanTree {
  std::vector<HuffmanCode> codes;  // per word id
  std::size_t internal_nodes = 0;  // V - 1
};

// Binary Huffman tree over word counts; equal counts merge smaller id
// first. Throws DataError for vocabularies below two words.
HuffmanTree build_huffman(const Vocabulary& vocab);

// Unigram^power noise distribution with exact alias-method draws.
class NegativeTable {
 public:
  NegativeTable(const Vocabulary& vocab, double power);

  std::uint32_t draw(Rng& rng) const;
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
  std::vector<double> accept_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace embedkit::vocab
