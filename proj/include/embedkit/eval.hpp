#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "embedkit/embedding.hpp"

namespace embedkit::eval {

// Cosine of the angle between two vectors. Throws DataError on dimension
// mismatch or a zero-norm input.
double cosine(std::span<const double> a, std::span<const double> b);

struct Neighbor {
  std::string token;
  double score = 0.0;
};

// The k highest-cosine tokens excluding the query, descending score, ties
// lexicographic. Throws DataError for out-of-vocabulary queries.
std::vector<Neighbor> nearest_neighbors(const Embedding& embedding,
                                        const std::string& query,
                                        std::size_t k);

struct WordPair {
  std::string a, b;
  double human_score = 0.0;
};

struct WordPairSet {
  std::string name;
  std::vector<WordPair> pairs;
  std::size_t n_excluded = 0;  // '!'-prefixed entries, counted but unused
};

// TSV "word_a<TAB>word_b<TAB>score"; '#' comment lines skipped;
// '!'-prefixed lines mark excluded (e.g. untranslated) pairs.
// Throws DataError naming the offending line on malformed input.
WordPairSet load_word_pairs(const std::filesystem::path& path);

struct PairScore {
  std::string a, b;
  double human_score = 0.0;
  std::optional<double> model_score;  // absent when either word is OOV
};

struct SimilarityReport {
  std::string name;
  std::vector<PairScore> pairs;
  std::optional<double> mean_model_score;
  std::optional<double> spearman_rho;
  std::size_t n_scored = 0;
  std::size_t n_oov_pairs = 0;
};

// Spearman rank correlation with average ranks for ties. Undefined
// (absent) when either list is constant; throws DataError for n < 2 or
// mismatched lengths.
std::optional<double> spearman(const std::vector<double>& model_scores,
                               const std::vector<double>& human_scores);

// Per-pair cosine scores with OOV pairs surfaced, never imputed.
SimilarityReport word_pair_report(const WordPairSet& pairs,
                                  const Embedding& embedding);

// word_pair_report plus Spearman rho over the scored pairs.
SimilarityReport wordsim_eval(const Embedding& embedding,
                              const WordPairSet& pairs);

}  // namespace embedkit::eval
