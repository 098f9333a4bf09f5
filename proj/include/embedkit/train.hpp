#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "embedkit/cooc.hpp"
#include "embedkit/embedding.hpp"
#include "embedkit/matrix.hpp"
#include "embedkit/rng.hpp"
#include "embedkit/textpipe.hpp"
#include "embedkit/vocab.hpp"

namespace embedkit::train {

enum class Model { kCbow, kSg, kGlove };
enum class Loss { kHierarchicalSoftmax, kNegativeSampling };

struct TrainConfig {
  Model model = Model::kCbow;
  int dim = 300;
  int epochs = 40;
  double lr = 0.25;
  int ws = 7;
  int negatives = 20;
  int minn = 2;
  int maxn = 7;
  std::uint64_t minw = 4;
  double t = 1e-4;
  bool position_weights = false;  // CBoW only
  double x_max = 100.0;           // GloVe weighting clamp
  double alpha = 0.75;            // GloVe weighting exponent
  std::uint64_t seed = 1;
  int workers = 1;
  std::uint32_t n_buckets = 2'000'000;
  double unigram_power = 0.75;         // noise-distribution exponent
  std::optional<Loss> loss;            // default: hs for CBoW, ns for SG
  std::string checkpoint_dir;          // per-epoch vector dumps when set

  Loss effective_loss() const {
    if (loss) return *loss;
    return model == Model::kSg ? Loss::kNegativeSampling
                               : Loss::kHierarchicalSoftmax;
  }
};

// Uniform truncation draw in {1..ws}; gives a distance-d context the
// inclusion probability (ws - d + 1) / ws.
int dynamic_window(int ws, Rng& rng);

// ---------------------------------------------------------------------------
// Pure objective/gradient kernels. These are the exact quantities the
// training steps apply; the numeric test suite differentiates them.
// ---------------------------------------------------------------------------

struct GloveGrad {
  double loss = 0.0;
  std::vector<double> grad_w, grad_c;
  double grad_bw = 0.0, grad_bc = 0.0;
};

// Weighted squared regression residual for one co-occurrence entry:
// loss = f(x) (w.c + bw + bc - log x)^2, f(x) = min(1, (x/x_max)^alpha).
// Throws DataError for x <= 0.
GloveGrad glove_loss_grad(std::span<const double> w, std::span<const double> c,
                          double bw, double bc, double x, double x_max,
                          double alpha);

// Negative-sampling objective for hidden vector h against one positive and
// k negative output rows: log s(h.v+) + sum log s(-h.v-). Ascent direction.
double ns_objective(std::span<const double> h, std::span<const double> v_pos,
                    const std::vector<std::span<const double>>& v_neg);

// Hierarchical-softmax objective along a Huffman path:
// sum log s((1 - 2 bit) (h.v_node)). Ascent direction.
double hs_objective(std::span<const double> h,
                    const std::vector<std::span<const double>>& nodes,
                    std::span<const std::uint8_t> bits);

// ---------------------------------------------------------------------------
// word2vec (CBoW / SG) parameter set
// ---------------------------------------------------------------------------

struct Word2VecModel {
  Matrix input;     // (V + n_buckets) x D: word rows then bucket rows
  Matrix output;    // ns: V x D context rows; hs: (V-1) x D node rows
  Matrix position;  // 2 ws x D, ones; live only with position_weights
  vocab::SubwordIndex subword;
  vocab::HuffmanTree tree;  // populated for hs
  std::vector<std::vector<std::uint32_t>> rows_of_word;  // composition sets
  std::size_t vocab_size = 0;
  int dim = 0;
  int ws = 0;
  Loss loss = Loss::kHierarchicalSoftmax;
  bool position_weights = false;

  // Relative position p in {-ws..-1, +1..+ws} -> row of `position`.
  std::size_t position_row(int p) const;

  // Sub-word composition: sum of the word row and its n-gram bucket rows.
  std::vector<double> compose(std::uint32_t word) const;
};

Word2VecModel init_word2vec(const vocab::Vocabulary& vocab,
                            const TrainConfig& config);

// Sparse gradients of one step objective, keyed by matrix row. Used to
// verify the applied updates against finite differences.
struct StepGrads {
  double objective = 0.0;
  std::unordered_map<std::uint32_t, std::vector<double>> input;
  std::unordered_map<std::uint32_t, std::vector<double>> output;
  std::unordered_map<std::uint32_t, std::vector<double>> position;
};

// SG with explicit negatives (ns) or Huffman path (hs): pure evaluation.
double sg_step_objective(const Word2VecModel& model, std::uint32_t center,
                         std::uint32_t context,
                         std::span<const std::uint32_t> negatives);
StepGrads sg_step_grads(const Word2VecModel& model, std::uint32_t center,
                        std::uint32_t context,
                        std::span<const std::uint32_t> negatives);

// CBoW over a context window (ids + relative positions): pure evaluation.
double cbow_step_objective(const Word2VecModel& model,
                           std::span<const std::uint32_t> context,
                           std::span<const int> rel_positions,
                           std::uint32_t target,
                           std::span<const std::uint32_t> negatives);
StepGrads cbow_step_grads(const Word2VecModel& model,
                          std::span<const std::uint32_t> context,
                          std::span<const int> rel_positions,
                          std::uint32_t target,
                          std::span<const std::uint32_t> negatives);

// One ascent step. Negatives are drawn from `table` for the ns loss
// (draws equal to the positive are skipped). Returns the step objective.
double sg_step(Word2VecModel& model, std::uint32_t center,
               std::uint32_t context, const vocab::NegativeTable* table, int k,
               double lr, Rng& rng);
double cbow_step(Word2VecModel& model, std::span<const std::uint32_t> context,
                 std::span<const int> rel_positions, std::uint32_t target,
                 const vocab::NegativeTable* table, int k, double lr, Rng& rng);

// ---------------------------------------------------------------------------
// Full training drivers
// ---------------------------------------------------------------------------

struct TrainResult {
  Embedding embedding;
  std::vector<double> epoch_loss;           // mean loss per epoch
  std::vector<std::uint64_t> scheduled;     // per word: occurrences visited
  std::vector<std::uint64_t> kept;          // per word: survived sub-sampling
};

// Exported vector of a word under the sub-word model: composition sum
// divided by the number of composed rows.
Embedding export_word2vec(const Word2VecModel& model,
                          const vocab::Vocabulary& vocab);

TrainResult train_word2vec(const textpipe::TokenStream& stream,
                           const vocab::Vocabulary& vocab,
                           const TrainConfig& config);

// AdaGrad over shuffled co-occurrence entries; exported vector = w + c.
TrainResult train_glove(const CoocMatrix& cooc, const vocab::Vocabulary& vocab,
                        const TrainConfig& config);

}  // namespace embedkit::train
