#include "embedkit/vocab.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "embedkit/errors.hpp"
#include "embedkit/unicode.hpp"

namespace embedkit::vocab {

Vocabulary build_vocab(const textpipe::TokenStream& stream, std::uint64_t minw,
                       std::optional<std::size_t> max_vocab, double t) {
  if (minw < 1) throw DataError("minw must be >= 1");
  if (t <= 0.0) throw DataError("sub-sampling threshold t must be > 0");

  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& sentence : stream.sentences)
    for (const auto& token : sentence) ++counts[token];

  std::vector<std::pair<std::string, std::uint64_t>> entries;
  entries.reserve(counts.size());
  for (auto& [token, count] : counts)
    if (count >= minw) entries.emplace_back(token, count);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (max_vocab && entries.size() > *max_vocab) entries.resize(*max_vocab);
  if (entries.empty())
    throw DataError("vocabulary is empty after rare-word deletion");

  Vocabulary vocab;
  vocab.tokens.reserve(entries.size());
  vocab.counts.reserve(entries.size());
  for (auto& [token, count] : entries) {
    vocab.id_of.emplace(token, static_cast<std::uint32_t>(vocab.tokens.size()));
    vocab.tokens.push_back(std::move(token));
    vocab.counts.push_back(count);
    vocab.total_tokens += count;
  }
  vocab.discard_prob.resize(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    double f = static_cast<double>(vocab.counts[i]) /
               static_cast<double>(vocab.total_tokens);
    double p = 1.0 - std::sqrt(t / f);
    vocab.discard_prob[i] = std::clamp(p, 0.0, 1.0);
  }
  return vocab;
}

std::vector<std::string> char_ngrams(std::string_view word, int minn,
                                     int maxn) {
  std::u32string wrapped;
  wrapped.push_back(U'<');
  wrapped += uni::decode_utf8(word);
  wrapped.push_back(U'>');

  const int len = static_cast<int>(wrapped.size());
  std::vector<std::string> ngrams;
  for (int n = minn; n <= maxn && n <= len; ++n)
    for (int pos = 0; pos + n <= len; ++pos)
      ngrams.push_back(uni::encode_utf8(
          std::u32string_view(wrapped.data() + pos, static_cast<std::size_t>(n))));
  if (len < minn || len > maxn) ngrams.push_back(uni::encode_utf8(wrapped));
  return ngrams;
}

std::uint32_t hash_ngram(std::string_view ngram, const SubwordIndex& index) {
  std::uint32_t h = 2166136261u;
  for (unsigned char byte : ngram) {
    h ^= byte;
    h *= 16777619u;
  }
  return h % index.n_buckets;
}

HuffmanTree build_huffman(const Vocabulary& vocab) {
  const std::size_t v = vocab.size();
  if (v < 2) throw DataError("Huffman tree needs at least 2 words");

  // Node ids: leaves 0..V-1, internal nodes V..2V-2 in creation order.
  struct Node {
    std::uint64_t count;
    std::uint32_t id;
  };
  auto cmp = [](const Node& a, const Node& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.id > b.id;  // equal counts: smaller id first
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> heap(cmp);
  for (std::uint32_t i = 0; i < v; ++i)
    heap.push({vocab.counts[i], i});

  std::vector<std::uint32_t> parent(2 * v - 1, 0);
  std::vector<std::uint8_t> branch(2 * v - 1, 0);
  std::vector<std::uint64_t> node_count(2 * v - 1, 0);
  for (std::uint32_t i = 0; i < v; ++i) node_count[i] = vocab.counts[i];

  std::uint32_t next_id = static_cast<std::uint32_t>(v);
  while (heap.size() > 1) {
    Node left = heap.top();
    heap.pop();
    Node right = heap.top();
    heap.pop();
    parent[left.id] = next_id;
    branch[left.id] = 0;
    parent[right.id] = next_id;
    branch[right.id] = 1;
    node_count[next_id] = left.count + right.count;
    heap.push({node_count[next_id], next_id});
    ++next_id;
  }

  const std::uint32_t root = static_cast<std::uint32_t>(2 * v - 2);
  HuffmanTree tree;
  tree.internal_nodes = v - 1;
  tree.codes.resize(v);
  for (std::uint32_t w = 0; w < v; ++w) {
    std::vector<std::uint32_t> path;
    std::vector<std::uint8_t> bits;
    std::uint32_t node = w;
    while (node != root) {
      bits.push_back(branch[node]);
      path.push_back(parent[node] - static_cast<std::uint32_t>(v));
      node = parent[node];
    }
    std::reverse(path.begin(), path.end());
    std::reverse(bits.begin(), bits.end());
    tree.codes[w] = {std::move(path), std::move(bits)};
  }
  return tree;
}

NegativeTable::NegativeTable(const Vocabulary& vocab, double power) {
  if (vocab.size() == 0) throw DataError("negative table over empty vocabulary");
  if (power <= 0.0 || power > 1.0)
    throw DataError("negative-table power must be in (0, 1]");

  const std::size_t n = vocab.size();
  probs_.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    probs_[i] = std::pow(static_cast<double>(vocab.counts[i]), power);
    total += probs_[i];
  }
  for (auto& p : probs_) p /= total;

  // Walker/Vose alias construction.
  accept_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = probs_[i] * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    std::uint32_t s = small.back();
    small.pop_back();
    std::uint32_t l = large.back();
    large.pop_back();
    accept_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (std::uint32_t i : large) accept_[i] = 1.0;
  for (std::uint32_t i : small) accept_[i] = 1.0;
}

std::uint32_t NegativeTable::draw(Rng& rng) const {
  const std::size_t n = probs_.size();
  auto slot = static_cast<std::uint32_t>(rng.next_below(n));
  return rng.next_double() < accept_[slot] ? slot : alias_[slot];
}

}  // namespace embedkit::vocab
