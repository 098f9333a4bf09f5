#include <atomic>
#include <cmath>
#include <filesystem>
#include <thread>

#include "embedkit/errors.hpp"
#include "embedkit/io.hpp"
#include "embedkit/train.hpp"

namespace embedkit::train {
namespace {

void check_finite(const Word2VecModel& model, int epoch) {
  auto scan = [&](const Matrix& m, const char* name) {
    for (double x : m.data())
      if (!std::isfinite(x))
        throw DivergenceError("non-finite " + std::string(name) +
                              " parameter after epoch " +
                              std::to_string(epoch + 1));
  };
  scan(model.input, "input");
  scan(model.output, "output");
  if (model.position_weights) scan(model.position, "position");
}

struct EpochStats {
  double objective_sum = 0.0;
  std::uint64_t steps = 0;
};

// Processes sentences [begin, end). `processed` drives the global linear
// lr decay; with one worker it is a plain counter.
void run_shard(Word2VecModel& model, const TrainConfig& config,
               const vocab::Vocabulary& vocab,
               const std::vector<std::vector<std::uint32_t>>& corpus,
               std::size_t begin, std::size_t end,
               const vocab::NegativeTable* table, Rng& rng,
               std::atomic<std::uint64_t>& processed,
               std::uint64_t total_schedule, EpochStats& stats,
               std::vector<std::uint64_t>& scheduled,
               std::vector<std::uint64_t>& kept) {
  std::vector<std::uint32_t> reduced;
  std::vector<std::uint32_t> context;
  std::vector<int> rel_positions;
  const double min_lr = config.lr * 1e-4;

  for (std::size_t s = begin; s < end; ++s) {
    const auto& sentence = corpus[s];
    const double done =
        static_cast<double>(processed.load(std::memory_order_relaxed)) /
        static_cast<double>(total_schedule);
    const double lr = std::max(config.lr * (1.0 - done), min_lr);

    reduced.clear();
    for (std::uint32_t w : sentence) {
      ++scheduled[w];
      if (rng.next_double() < vocab.discard_prob[w]) continue;
      ++kept[w];
      reduced.push_back(w);
    }

    const auto n = static_cast<std::ptrdiff_t>(reduced.size());
    for (std::ptrdiff_t pos = 0; pos < n; ++pos) {
      const std::uint32_t center = reduced[pos];
      const int b = dynamic_window(config.ws, rng);
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, pos - b);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, pos + b);
      if (config.model == Model::kSg) {
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
          if (j == pos) continue;
          stats.objective_sum += sg_step(model, center, reduced[j], table,
                                         config.negatives, lr, rng);
          ++stats.steps;
        }
      } else {
        context.clear();
        rel_positions.clear();
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
          if (j == pos) continue;
          context.push_back(reduced[j]);
          rel_positions.push_back(static_cast<int>(j - pos));
        }
        if (context.empty()) continue;
        stats.objective_sum += cbow_step(model, context, rel_positions, center,
                                         table, config.negatives, lr, rng);
        ++stats.steps;
      }
    }
    processed.fetch_add(sentence.size(), std::memory_order_relaxed);
  }
}

}  // namespace

TrainResult train_word2vec(const textpipe::TokenStream& stream,
                           const vocab::Vocabulary& vocab,
                           const TrainConfig& config) {
  if (config.model == Model::kGlove)
    throw DataError("train_word2vec does not handle the GloVe model");
  if (config.dim < 1 || config.epochs < 1 || config.lr <= 0.0 ||
      config.ws < 1 || config.workers < 1)
    throw DataError("invalid training configuration");
  if (config.effective_loss() == Loss::kNegativeSampling && config.negatives < 1)
    throw DataError("negative sampling needs k >= 1");

  // In-vocabulary ids only: rare-word deletion happens before windows.
  // Unbroken sentences are chunked so sharding and window scans stay
  // bounded on newline-free corpora.
  constexpr std::size_t kMaxSentence = 1000;
  std::vector<std::vector<std::uint32_t>> corpus;
  std::uint64_t schedule_per_epoch = 0;
  for (const auto& sentence : stream.sentences) {
    std::vector<std::uint32_t> ids;
    ids.reserve(std::min(sentence.size(), kMaxSentence));
    for (const auto& token : sentence) {
      const auto id = vocab.id(token);
      if (id < 0) continue;
      ids.push_back(static_cast<std::uint32_t>(id));
      if (ids.size() == kMaxSentence) {
        schedule_per_epoch += ids.size();
        corpus.push_back(std::move(ids));
        ids = {};
      }
    }
    if (!ids.empty()) {
      schedule_per_epoch += ids.size();
      corpus.push_back(std::move(ids));
    }
  }
  if (corpus.empty()) throw DataError("no in-vocabulary tokens to train on");

  Word2VecModel model = init_word2vec(vocab, config);
  std::optional<vocab::NegativeTable> table;
  if (model.loss == Loss::kNegativeSampling)
    table.emplace(vocab, config.unigram_power);

  TrainResult result;
  result.scheduled.assign(vocab.size(), 0);
  result.kept.assign(vocab.size(), 0);

  std::atomic<std::uint64_t> processed{0};
  const std::uint64_t total_schedule =
      schedule_per_epoch * static_cast<std::uint64_t>(config.epochs);

  Rng sequential_rng(config.seed);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    EpochStats stats;
    if (config.workers == 1) {
      run_shard(model, config, vocab, corpus, 0, corpus.size(),
                table ? &*table : nullptr, sequential_rng, processed,
                total_schedule, stats, result.scheduled, result.kept);
    } else {
      const int w = config.workers;
      std::vector<EpochStats> shard_stats(w);
      std::vector<std::vector<std::uint64_t>> shard_sched(
          w, std::vector<std::uint64_t>(vocab.size(), 0));
      std::vector<std::vector<std::uint64_t>> shard_kept(
          w, std::vector<std::uint64_t>(vocab.size(), 0));
      std::vector<std::thread> threads;
      const std::size_t per = (corpus.size() + w - 1) / w;
      for (int i = 0; i < w; ++i) {
        const std::size_t begin = std::min(corpus.size(), per * i);
        const std::size_t end = std::min(corpus.size(), per * (i + 1));
        threads.emplace_back([&, i, begin, end] {
          Rng rng(config.seed ^
                  (0x9E3779B97F4A7C15ULL *
                   (static_cast<std::uint64_t>(epoch) * w + i + 1)));
          run_shard(model, config, vocab, corpus, begin, end,
                    table ? &*table : nullptr, rng, processed, total_schedule,
                    shard_stats[i], shard_sched[i], shard_kept[i]);
        });
      }
      for (auto& t : threads) t.join();
      for (int i = 0; i < w; ++i) {
        stats.objective_sum += shard_stats[i].objective_sum;
        stats.steps += shard_stats[i].steps;
        for (std::size_t j = 0; j < vocab.size(); ++j) {
          result.scheduled[j] += shard_sched[i][j];
          result.kept[j] += shard_kept[i][j];
        }
      }
    }

    check_finite(model, epoch);
    const double mean_loss =
        stats.steps ? -stats.objective_sum / static_cast<double>(stats.steps)
                    : 0.0;
    if (!std::isfinite(mean_loss))
      throw DivergenceError("non-finite loss in epoch " +
                            std::to_string(epoch + 1));
    result.epoch_loss.push_back(mean_loss);

    if (!config.checkpoint_dir.empty()) {
      std::filesystem::create_directories(config.checkpoint_dir);
      io::write_vectors_binary(
          std::filesystem::path(config.checkpoint_dir) /
              ("epoch_" + std::to_string(epoch + 1) + ".ekvb"),
          export_word2vec(model, vocab));
    }
  }

  result.embedding = export_word2vec(model, vocab);
  return result;
}

}  // namespace embedkit::train
