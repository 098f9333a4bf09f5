#include <doctest.h>

#include <string>
#include <vector>

#include "embedkit/eval.hpp"
#include "embedkit/io.hpp"
#include "embedkit/rng.hpp"
#include "embedkit/textpipe.hpp"
#include "embedkit/train.hpp"
#include "embedkit/unicode.hpp"
#include "embedkit/vocab.hpp"
#include "temp_dir.hpp"

using namespace embedkit;

namespace {

// Arabic-script words assembled per topic block, so the whole
// clean -> vocab -> train -> evaluate path runs over multi-byte tokens.
std::vector<std::string> block_words(int block) {
  static const std::vector<std::u32string> letters = {
      U"سندب",   // seen noon dal beh
      U"جمله",   // jeem meem lam heh
      U"قرطع",   // qaf reh tah ain
  };
  std::vector<std::string> words;
  const auto& pool = letters[block];
  for (char32_t first : pool)
    for (char32_t second : pool) {
      std::u32string w;
      w.push_back(first);
      w.push_back(second);
      w.push_back(pool[0]);
      words.push_back(uni::encode_utf8(w));
    }
  return words;
}

}  // namespace

TEST_CASE("arabic-script corpus end to end") {
  TempDir dir;
  Rng rng(71);

  std::string raw;
  std::vector<std::vector<std::string>> blocks = {
      block_words(0), block_words(1), block_words(2)};
  for (int s = 0; s < 700; ++s) {
    const auto block = rng.next_below(3);
    for (int i = 0; i < 10; ++i) {
      raw += blocks[block][rng.next_below(blocks[block].size())];
      raw += " ";
    }
    // Web noise: Latin words, digits, Arabic punctuation.
    raw += "English <i>tag</i> \xd9\xa1\xd9\xa2\xd9\xa3\xd8\x9f\n";
  }
  const auto raw_path = dir.write("raw.txt", raw);

  textpipe::CleanConfig config;
  const auto stream = textpipe::clean({raw_path}, config);
  REQUIRE_FALSE(stream.sentences.empty());
  for (const auto& sentence : stream.sentences)
    for (const auto& token : sentence)
      for (char32_t cp : uni::decode_utf8(token))
        CHECK((uni::is_letter(cp) || uni::is_mark(cp)));

  const auto vocabulary = vocab::build_vocab(stream, 2, std::nullopt, 1.0);
  CHECK(vocabulary.size() > 30);

  train::TrainConfig tc;
  tc.model = train::Model::kSg;
  tc.dim = 16;
  tc.epochs = 2;
  tc.ws = 3;
  tc.negatives = 4;
  tc.lr = 0.05;
  tc.minn = 2;
  tc.maxn = 3;
  tc.n_buckets = 4096;
  tc.seed = 9;
  const auto result = train::train_word2vec(stream, vocabulary, tc);

  // Vectors round-trip through the text format with multi-byte tokens.
  const auto vec_path = dir.path / "vec.txt";
  io::write_vectors(vec_path, result.embedding);
  const auto loaded = io::read_vectors(vec_path);
  CHECK(loaded.tokens == result.embedding.tokens);

  // Neighbor retrieval favors words from the same block.
  const std::string query = blocks[0][0];
  REQUIRE(loaded.id(query) >= 0);
  const auto neighbors = eval::nearest_neighbors(loaded, query, 8);
  CHECK(neighbors.size() == 8);
  int same_block = 0;
  for (const auto& nb : neighbors) {
    bool found = false;
    for (const auto& w : blocks[0]) found |= w == nb.token;
    if (found) ++same_block;
  }
  CHECK(same_block >= 5);
}
