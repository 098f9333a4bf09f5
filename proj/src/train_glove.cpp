#include <algorithm>
#include <cmath>
#include <thread>

#include "embedkit/errors.hpp"
#include "embedkit/train.hpp"

namespace embedkit::train {
namespace {

struct Entry {
  std::uint32_t i, j;
  double x;
};

struct GloveParams {
  Matrix w, c;                  // V x D each
  std::vector<double> bw, bc;   // biases
  Matrix gw, gc;                // AdaGrad accumulators
  std::vector<double> gbw, gbc;
};

// One AdaGrad step on a single entry; returns the weighted loss at the
// pre-update parameters. True gradients of f(x) r^2, scaled per
// coordinate by the accumulated squared gradients.
double glove_update(GloveParams& p, const Entry& e, double lr, double x_max,
                    double alpha) {
  const std::size_t d = p.w.cols();
  auto wi = p.w.row(e.i);
  auto cj = p.c.row(e.j);
  const double weight = std::min(1.0, std::pow(e.x / x_max, alpha));
  const double residual =
      dot(wi, cj) + p.bw[e.i] + p.bc[e.j] - std::log(e.x);
  const double scale = 2.0 * weight * residual;

  auto gwi = p.gw.row(e.i);
  auto gcj = p.gc.row(e.j);
  for (std::size_t k = 0; k < d; ++k) {
    const double gw = scale * cj[k];
    const double gc = scale * wi[k];
    wi[k] -= lr * gw / std::sqrt(gwi[k]);
    cj[k] -= lr * gc / std::sqrt(gcj[k]);
    gwi[k] += gw * gw;
    gcj[k] += gc * gc;
  }
  p.bw[e.i] -= lr * scale / std::sqrt(p.gbw[e.i]);
  p.bc[e.j] -= lr * scale / std::sqrt(p.gbc[e.j]);
  p.gbw[e.i] += scale * scale;
  p.gbc[e.j] += scale * scale;
  return weight * residual * residual;
}

}  // namespace

TrainResult train_glove(const CoocMatrix& cooc, const vocab::Vocabulary& vocab,
                        const TrainConfig& config) {
  if (cooc.empty()) throw DataError("empty co-occurrence matrix");
  if (config.dim < 1 || config.epochs < 1 || config.lr <= 0.0 ||
      config.workers < 1 || config.x_max <= 0.0 || config.alpha <= 0.0)
    throw DataError("invalid training configuration");

  const std::size_t v = vocab.size();
  const auto d = static_cast<std::size_t>(config.dim);

  // Both ordered directions of every stored unordered cell are fitted, the
  // diagonal once. Canonical order first so runs are reproducible.
  std::vector<Entry> entries;
  entries.reserve(2 * cooc.size());
  for (const auto& [key, x] : cooc.cells()) {
    auto i = static_cast<std::uint32_t>(key >> 32);
    auto j = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
    if (i >= v || j >= v) throw DataError("co-occurrence id outside vocabulary");
    entries.push_back({i, j, x});
    if (i != j) entries.push_back({j, i, x});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });

  GloveParams p;
  p.w = Matrix(v, d);
  p.c = Matrix(v, d);
  p.gw = Matrix(v, d, 1.0);
  p.gc = Matrix(v, d, 1.0);
  p.bw.resize(v);
  p.bc.resize(v);
  p.gbw.assign(v, 1.0);
  p.gbc.assign(v, 1.0);

  Rng rng(config.seed);
  for (double& x : p.w.data()) x = (rng.next_double() - 0.5) / config.dim;
  for (double& x : p.c.data()) x = (rng.next_double() - 0.5) / config.dim;
  for (double& x : p.bw) x = (rng.next_double() - 0.5) / config.dim;
  for (double& x : p.bc) x = (rng.next_double() - 0.5) / config.dim;

  TrainResult result;
  result.scheduled.assign(v, 0);
  result.kept.assign(v, 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = entries.size(); i > 1; --i)
      std::swap(entries[i - 1], entries[rng.next_below(i)]);

    double loss_sum = 0.0;
    if (config.workers == 1) {
      for (const Entry& e : entries)
        loss_sum += glove_update(p, e, config.lr, config.x_max, config.alpha);
    } else {
      const int w = config.workers;
      std::vector<double> shard_loss(w, 0.0);
      std::vector<std::thread> threads;
      const std::size_t per = (entries.size() + w - 1) / w;
      for (int t = 0; t < w; ++t) {
        const std::size_t begin = std::min(entries.size(), per * t);
        const std::size_t end = std::min(entries.size(), per * (t + 1));
        threads.emplace_back([&, t, begin, end] {
          for (std::size_t k = begin; k < end; ++k)
            shard_loss[t] +=
                glove_update(p, entries[k], config.lr, config.x_max, config.alpha);
        });
      }
      for (auto& th : threads) th.join();
      for (double l : shard_loss) loss_sum += l;
    }

    const double mean_loss = loss_sum / static_cast<double>(entries.size());
    if (!std::isfinite(mean_loss))
      throw DivergenceError("non-finite GloVe loss in epoch " +
                            std::to_string(epoch + 1));
    result.epoch_loss.push_back(mean_loss);
  }

  for (double x : p.w.data())
    if (!std::isfinite(x)) throw DivergenceError("non-finite GloVe parameter");
  for (double x : p.c.data())
    if (!std::isfinite(x)) throw DivergenceError("non-finite GloVe parameter");

  result.embedding.tokens = vocab.tokens;
  result.embedding.vectors = Matrix(v, d);
  for (std::size_t w = 0; w < v; ++w) {
    auto out = result.embedding.vectors.row(w);
    auto ww = p.w.row(w);
    auto cw = p.c.row(w);
    for (std::size_t k = 0; k < d; ++k) out[k] = ww[k] + cw[k];
  }
  result.embedding.build_index();
  return result;
}

}  // namespace embedkit::train
