#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "embedkit/errors.hpp"
#include "embedkit/rng.hpp"
#include "embedkit/vocab.hpp"

using namespace embedkit;
using vocab::Vocabulary;

namespace {

textpipe::TokenStream stream_of(
    std::vector<std::vector<std::string>> sentences) {
  textpipe::TokenStream s;
  s.sentences = std::move(sentences);
  s.recount();
  return s;
}

textpipe::TokenStream counted(
    const std::vector<std::pair<std::string, int>>& counts) {
  std::vector<std::string> tokens;
  for (const auto& [word, n] : counts)
    for (int i = 0; i < n; ++i) tokens.push_back(word);
  return stream_of({tokens});
}

Vocabulary vocab_of(const std::vector<std::pair<std::string, int>>& counts,
                    double t = 1e-4) {
  return vocab::build_vocab(counted(counts), 1, std::nullopt, t);
}

// Minimum possible sum of count * codelen over all prefix codes, by
// subset DP: every internal node of a code tree contributes the total
// count beneath it.
std::uint64_t optimal_code_cost(const std::vector<std::uint64_t>& counts) {
  const std::size_t n = counts.size();
  const std::size_t full = (1u << n) - 1;
  std::vector<std::uint64_t> sum(full + 1, 0), best(full + 1, 0);
  for (std::size_t mask = 1; mask <= full; ++mask)
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) sum[mask] += counts[i];
  for (std::size_t mask = 1; mask <= full; ++mask) {
    if ((mask & (mask - 1)) == 0) continue;  // singleton
    std::uint64_t m = ~0ull;
    for (std::size_t part = (mask - 1) & mask; part; part = (part - 1) & mask) {
      const std::size_t other = mask ^ part;
      if (part > other) continue;  // each split once
      m = std::min(m, best[part] + best[other]);
    }
    best[mask] = m + sum[mask];
  }
  return best[full];
}

}  // namespace

TEST_CASE("build_vocab") {
  SUBCASE("rare words deleted by minw") {
    auto v = vocab::build_vocab(
        counted({{"a", 5}, {"b", 3}, {"c", 1}}), 4, std::nullopt, 1e-4);
    REQUIRE(v.size() == 1);
    CHECK(v.tokens[0] == "a");
    CHECK(v.total_tokens == 5);
  }
  SUBCASE("ids ordered by count then token") {
    auto v = vocab_of({{"b", 3}, {"c", 3}, {"a", 7}});
    CHECK(v.tokens == std::vector<std::string>{"a", "b", "c"});
    CHECK(v.id("b") == 1);
    CHECK(v.id("zzz") == -1);
  }
  SUBCASE("max_vocab trims the tail") {
    auto v = vocab::build_vocab(counted({{"a", 9}, {"b", 5}, {"c", 2}}), 1,
                                std::size_t{2}, 1e-4);
    CHECK(v.tokens == std::vector<std::string>{"a", "b"});
    CHECK(v.total_tokens == 14);
  }
  SUBCASE("discard probability follows the sub-sampling formula") {
    // f(w) = t gives probability 0.
    auto v = vocab_of({{"a", 1}, {"b", 9999}}, 1.0 / 10000.0);
    CHECK(v.discard_prob[v.id("a")] == doctest::Approx(0.0).epsilon(1e-12));
    // t = 1e-4, f = 1e-2: 1 - sqrt(1e-4 / 1e-2) = 0.9.
    auto w = vocab_of({{"x", 1}, {"pad", 99}}, 1e-4);
    CHECK(w.discard_prob[w.id("x")] == doctest::Approx(0.9).epsilon(1e-12));
    // f < t clamps to 0, never negative.
    auto u = vocab_of({{"r", 1}, {"pad", 9}}, 0.5);
    CHECK(u.discard_prob[u.id("r")] == 0.0);
  }
  SUBCASE("empty vocabulary is an error") {
    CHECK_THROWS_AS(
        vocab::build_vocab(counted({{"a", 1}}), 2, std::nullopt, 1e-4),
        DataError);
  }
  SUBCASE("every retained token satisfies count >= minw") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<std::pair<std::string, int>> counts;
      for (int w = 0; w < 20; ++w)
        counts.emplace_back("w" + std::to_string(w),
                            1 + static_cast<int>(rng.next_below(10)));
      const std::uint64_t minw = 1 + rng.next_below(5);
      std::uint64_t expected = 0;
      for (const auto& [_, c] : counts)
        if (static_cast<std::uint64_t>(c) >= minw) ++expected;
      if (expected == 0) continue;
      auto v = vocab::build_vocab(counted(counts), minw, std::nullopt, 1e-4);
      CHECK(v.size() == expected);
      for (std::size_t i = 0; i < v.size(); ++i) CHECK(v.counts[i] >= minw);
    }
  }
}

TEST_CASE("sub-sampling retention matches 1 - discard_prob empirically") {
  auto v = vocab_of({{"x", 100}, {"pad", 900}}, 1e-2);
  const double p = v.discard_prob[v.id("x")];
  REQUIRE(p > 0.05);
  REQUIRE(p < 0.95);
  Rng rng(17);
  int retained = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i)
    if (!(rng.next_double() < p)) ++retained;
  CHECK(static_cast<double>(retained) / trials ==
        doctest::Approx(1.0 - p).epsilon(0.02));
}

TEST_CASE("char_ngrams") {
  SUBCASE("the canonical 3..6 enumeration") {
    const std::vector<std::string> expected = {
        "<ta",  "tab",   "abl",   "ble",  "le>",            // n = 3
        "<tab", "tabl",  "able",  "ble>",                   // n = 4
        "<tabl", "table", "able>",                          // n = 5
        "<table", "table>",                                 // n = 6
        "<table>"};                                         // whole word
    CHECK(vocab::char_ngrams("table", 3, 6) == expected);
  }
  SUBCASE("short word") {
    const std::vector<std::string> expected = {"<ab", "ab>", "<ab>"};
    CHECK(vocab::char_ngrams("ab", 3, 6) == expected);
  }
  SUBCASE("single window when minn = maxn = len + 2") {
    CHECK(vocab::char_ngrams("xyz", 5, 5) ==
          std::vector<std::string>{"<xyz>"});
  }
  SUBCASE("ngrams are code-point windows, not byte windows") {
    const auto grams = vocab::char_ngrams("\xd8\xb3\xd9\x86", 2, 2);
    // wrapped <xy> of 4 code points: 3 bigrams plus the whole word
    REQUIRE(grams.size() == 4);
    CHECK(grams[0] == "<\xd8\xb3");
    CHECK(grams[3] == "<\xd8\xb3\xd9\x86>");
  }
  SUBCASE("count formula over random words") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
      const int len = 1 + static_cast<int>(rng.next_below(9));
      std::string word;
      for (int i = 0; i < len; ++i)
        word.push_back(static_cast<char>('a' + rng.next_below(4)));
      const int minn = 1 + static_cast<int>(rng.next_below(4));
      const int maxn = minn + static_cast<int>(rng.next_below(4));
      const int wrapped = len + 2;
      std::size_t expected = 0;
      for (int n = minn; n <= maxn; ++n)
        expected += static_cast<std::size_t>(std::max(0, wrapped - n + 1));
      if (wrapped < minn || wrapped > maxn) ++expected;
      CHECK(vocab::char_ngrams(word, minn, maxn).size() == expected);
    }
  }
}

TEST_CASE("hash_ngram") {
  vocab::SubwordIndex index;
  index.n_buckets = 1000;
  CHECK(vocab::hash_ngram("<ta", index) == vocab::hash_ngram("<ta", index));

  // Fixed values pin the FNV-1a implementation across platforms.
  vocab::SubwordIndex wide;
  wide.n_buckets = 0xFFFFFFFFu;
  CHECK(vocab::hash_ngram("", wide) == 2166136261u % 0xFFFFFFFFu);
  CHECK(vocab::hash_ngram("a", wide) == 0xE40C292Cu % 0xFFFFFFFFu);
  CHECK(vocab::hash_ngram("foobar", wide) == 0xBF9CF968u % 0xFFFFFFFFu);

  SUBCASE("bucket bound holds for a million random strings") {
    Rng rng(29);
    bool in_range = true;
    for (int i = 0; i < 1000000; ++i) {
      std::string s;
      const int len = 1 + static_cast<int>(rng.next_below(12));
      for (int j = 0; j < len; ++j)
        s.push_back(static_cast<char>(rng.next_below(256)));
      in_range &= vocab::hash_ngram(s, index) < index.n_buckets;
    }
    CHECK(in_range);
  }
  SUBCASE("bucket load stays near uniform") {
    Rng rng(31);
    std::set<std::string> seen;
    std::vector<int> load(index.n_buckets, 0);
    while (seen.size() < 100000) {
      std::string s = "g" + std::to_string(rng.next_u64());
      if (seen.insert(s).second) ++load[vocab::hash_ngram(s, index)];
    }
    const double mean = 100000.0 / index.n_buckets;
    CHECK(*std::max_element(load.begin(), load.end()) <= 10.0 * mean);
  }
}

TEST_CASE("negative_table") {
  SUBCASE("uniform counts") {
    auto v = vocab_of({{"a", 1}, {"b", 1}});
    vocab::NegativeTable table(v, 1.0);
    CHECK(table.probs()[0] == doctest::Approx(0.5));
    CHECK(table.probs()[1] == doctest::Approx(0.5));
  }
  SUBCASE("16^0.75 = 8 against 1") {
    auto v = vocab_of({{"a", 16}, {"b", 1}});
    vocab::NegativeTable table(v, 0.75);
    CHECK(table.probs()[v.id("a")] == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    CHECK(table.probs()[v.id("b")] == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  }
  SUBCASE("draw frequencies match the distribution within 1%") {
    auto v = vocab_of({{"a", 50}, {"b", 20}, {"c", 5}, {"d", 1}});
    vocab::NegativeTable table(v, 0.75);
    Rng rng(37);
    std::vector<int> hits(v.size(), 0);
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) ++hits[table.draw(rng)];
    for (std::size_t w = 0; w < v.size(); ++w)
      CHECK(static_cast<double>(hits[w]) / draws ==
            doctest::Approx(table.probs()[w]).epsilon(0.01).scale(1.0));
  }
  SUBCASE("draws stay inside the vocabulary") {
    auto v = vocab_of({{"a", 3}, {"b", 2}, {"c", 1}});
    vocab::NegativeTable table(v, 0.75);
    Rng rng(41);
    for (int i = 0; i < 10000; ++i) CHECK(table.draw(rng) < v.size());
  }
}

TEST_CASE("build_huffman") {
  SUBCASE("two equal leaves get one-bit codes") {
    auto v = vocab_of({{"a", 1}, {"b", 1}});
    auto tree = vocab::build_huffman(v);
    CHECK(tree.internal_nodes == 1);
    CHECK(tree.codes[0].bits.size() == 1);
    CHECK(tree.codes[1].bits.size() == 1);
    CHECK(tree.codes[0].bits[0] != tree.codes[1].bits[0]);
  }
  SUBCASE("skewed counts give the frequent word the short code") {
    auto v = vocab_of({{"a", 4}, {"b", 1}, {"c", 1}});
    auto tree = vocab::build_huffman(v);
    CHECK(tree.codes[v.id("a")].bits.size() == 1);
    CHECK(tree.codes[v.id("b")].bits.size() == 2);
    CHECK(tree.codes[v.id("c")].bits.size() == 2);
  }
  SUBCASE("single word is an error") {
    CHECK_THROWS_AS(vocab::build_huffman(vocab_of({{"a", 3}})), DataError);
  }
  SUBCASE("codes are prefix-free") {
    Rng rng(43);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::pair<std::string, int>> counts;
      const int n = 2 + static_cast<int>(rng.next_below(30));
      for (int w = 0; w < n; ++w)
        counts.emplace_back("w" + std::to_string(w),
                            1 + static_cast<int>(rng.next_below(50)));
      auto tree = vocab::build_huffman(vocab_of(counts));
      std::set<std::string> codes;
      for (const auto& code : tree.codes) {
        std::string bits;
        for (auto b : code.bits) bits.push_back(b ? '1' : '0');
        codes.insert(bits);
      }
      CHECK(codes.size() == tree.codes.size());
      for (const auto& a : codes)
        for (const auto& b : codes)
          if (a != b) CHECK(b.rfind(a, 0) != 0);  // no a prefix of b
    }
  }
  SUBCASE("cost is minimal against the exhaustive prefix-code oracle") {
    Rng rng(47);
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 2 + static_cast<int>(rng.next_below(4));  // V <= 5
      std::vector<std::pair<std::string, int>> counts;
      for (int w = 0; w < n; ++w)
        counts.emplace_back("w" + std::to_string(w),
                            1 + static_cast<int>(rng.next_below(20)));
      auto v = vocab_of(counts);
      auto tree = vocab::build_huffman(v);
      std::uint64_t cost = 0;
      for (std::size_t w = 0; w < v.size(); ++w)
        cost += v.counts[w] * tree.codes[w].bits.size();
      CHECK(cost == optimal_code_cost(v.counts));
    }
  }
  SUBCASE("paths address valid internal nodes, root first") {
    auto v = vocab_of({{"a", 9}, {"b", 5}, {"c", 3}, {"d", 1}});
    auto tree = vocab::build_huffman(v);
    for (const auto& code : tree.codes) {
      REQUIRE(code.path.size() == code.bits.size());
      CHECK(code.path.front() == tree.internal_nodes - 1);  // root
      for (auto node : code.path) CHECK(node < tree.internal_nodes);
    }
  }
}
