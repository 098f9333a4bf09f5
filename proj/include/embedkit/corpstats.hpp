#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "embedkit/cooc.hpp"
#include "embedkit/textpipe.hpp"

namespace embedkit::stats {

struct FreqEntry {
  std::string item;
  std::uint64_t count = 0;
  double share = 0.0;
};

// Sorted by count descending, ties lexicographic ascending; shares sum
// to 1 for a nonzero total.
struct FreqTable {
  std::vector<FreqEntry> entries;
  std::uint64_t total = 0;
};

struct ZipfFit {
  double a = 0.0;
  double b = 0.0;
  double r_squared = 0.0;
  int n_ranks = 0;
};

// Per-code-point counts over all tokens. Throws DataError on an empty
// stream.
FreqTable letter_frequencies(const textpipe::TokenStream& stream);

// Least-squares fit of log F_r against log r over positive-count ranks;
// b is the negated slope, a = exp(intercept). Needs >= 2 ranks.
ZipfFit zipf_fit(const FreqTable& table);

// Token-occurrence counts keyed by word length in code points.
FreqTable word_length_distribution(const textpipe::TokenStream& stream);

FreqTable word_frequencies(const textpipe::TokenStream& stream);

// Highest-frequency tokens with share >= min_share, at most top_k, for
// human stop-word review. Not a final stoplist.
std::vector<FreqEntry> stopword_candidates(const FreqTable& table,
                                           std::size_t top_k, double min_share);

// Shifted positive PMI over a symmetric co-occurrence matrix:
// max(0, log(#(w,c) |D| / (#(w) #(c))) - log k), zeros unstored.
train::CoocMatrix sppmi_matrix(const train::CoocMatrix& cooc, unsigned k);

}  // namespace embedkit::stats
