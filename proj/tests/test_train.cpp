#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "embedkit/cooc.hpp"
#include "embedkit/errors.hpp"
#include "embedkit/eval.hpp"
#include "embedkit/rng.hpp"
#include "embedkit/textpipe.hpp"
#include "embedkit/train.hpp"
#include "embedkit/vocab.hpp"

using namespace embedkit;
using train::TrainConfig;
using train::Word2VecModel;

namespace {

textpipe::TokenStream stream_of(
    std::vector<std::vector<std::string>> sentences) {
  textpipe::TokenStream s;
  s.sentences = std::move(sentences);
  s.recount();
  return s;
}

vocab::Vocabulary test_vocab() {
  std::vector<std::string> tokens;
  const int counts[] = {10, 6, 4, 3, 2, 1};
  for (int w = 0; w < 6; ++w)
    for (int i = 0; i < counts[w]; ++i)
      tokens.push_back("word" + std::to_string(w));
  return vocab::build_vocab(stream_of({tokens}), 1, std::nullopt, 1e-4);
}

TrainConfig small_config(train::Model model, train::Loss loss) {
  TrainConfig config;
  config.model = model;
  config.loss = loss;
  config.dim = 5;
  config.ws = 3;
  config.negatives = 3;
  config.minn = 1;
  config.maxn = 2;
  config.n_buckets = 64;
  config.seed = 101;
  return config;
}

// Spread the parameters away from the tiny init so gradients are O(1).
void randomize(Word2VecModel& model, Rng& rng) {
  for (double& x : model.input.data()) x = rng.next_double() - 0.5;
  for (double& x : model.output.data()) x = rng.next_double() - 0.5;
  if (model.position_weights)
    for (double& x : model.position.data()) x = 0.5 + rng.next_double();
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

constexpr double kFdStep = 1e-5;

}  // namespace

TEST_CASE("dynamic_window") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) CHECK(train::dynamic_window(1, rng) == 1);

  // Inclusion frequency of a distance-d context equals (ws - d + 1) / ws.
  const int ws = 6;
  const int draws = 1000000;
  std::vector<int> at_least(ws + 1, 0);
  for (int i = 0; i < draws; ++i) {
    const int b = train::dynamic_window(ws, rng);
    CHECK(b >= 1);
    CHECK(b <= ws);
    for (int d = 1; d <= b; ++d) ++at_least[d];
  }
  for (int d = 1; d <= ws; ++d) {
    const double expected = static_cast<double>(ws - d + 1) / ws;
    const double observed = static_cast<double>(at_least[d]) / draws;
    CHECK(std::abs(observed - expected) < 0.01);
  }
}

TEST_CASE("build_cooccurrence") {
  auto v = vocab::build_vocab(stream_of({{"a", "b", "x", "x", "x"}}), 1,
                              std::nullopt, 1e-4);
  SUBCASE("adjacent pair gets weight 1") {
    auto cooc =
        train::build_cooccurrence(stream_of({{"a", "b"}}), v, 1);
    CHECK(cooc.get(v.id("a"), v.id("b")) == doctest::Approx(1.0));
  }
  SUBCASE("deletions shrink distances") {
    // With x in the vocabulary the pair sits 4 apart; once x is deleted the
    // pair becomes adjacent.
    auto with_x = train::build_cooccurrence(
        stream_of({{"a", "x", "x", "x", "b"}}), v, 7);
    CHECK(with_x.get(v.id("a"), v.id("b")) == doctest::Approx(0.25));

    auto no_x = vocab::build_vocab(stream_of({{"a", "a", "b", "b"}}), 1,
                                   std::nullopt, 1e-4);
    auto shrunk = train::build_cooccurrence(
        stream_of({{"a", "x", "x", "x", "b"}}), no_x, 7);
    CHECK(shrunk.get(no_x.id("a"), no_x.id("b")) == doctest::Approx(1.0));
  }
  SUBCASE("matches the naive double loop exactly") {
    Rng rng(7);
    for (int trial = 0; trial < 8; ++trial) {
      const int n_words = 6;
      std::vector<std::vector<std::string>> sentences;
      const int n_sent = 1 + static_cast<int>(rng.next_below(4));
      for (int s = 0; s < n_sent; ++s) {
        sentences.emplace_back();
        const int len = static_cast<int>(rng.next_below(500));
        for (int i = 0; i < len; ++i)
          sentences.back().push_back(
              "w" + std::to_string(rng.next_below(n_words)));
      }
      auto vv = vocab::build_vocab(stream_of(sentences), 1, std::nullopt, 1e-4);
      const int ws = 1 + static_cast<int>(rng.next_below(8));
      auto fast = train::build_cooccurrence(stream_of(sentences), vv, ws);

      std::map<std::pair<std::uint32_t, std::uint32_t>, double> naive;
      for (const auto& sentence : sentences) {
        std::vector<std::uint32_t> ids;
        for (const auto& t : sentence)
          ids.push_back(static_cast<std::uint32_t>(vv.id(t)));
        for (std::size_t i = 0; i < ids.size(); ++i)
          for (std::size_t j = i + 1;
               j < ids.size() && j - i <= static_cast<std::size_t>(ws); ++j) {
            auto a = std::min(ids[i], ids[j]);
            auto b = std::max(ids[i], ids[j]);
            naive[{a, b}] += 1.0 / static_cast<double>(j - i);
          }
      }
      CHECK(fast.size() == naive.size());
      for (const auto& [key, weight] : naive)
        CHECK(std::abs(fast.get(key.first, key.second) - weight) <= 1e-12);
    }
  }
}

TEST_CASE("glove_loss_grad") {
  SUBCASE("zero residual gives zero loss and gradients") {
    // w.c = 0.06, choose biases so the prediction equals log x exactly.
    std::vector<double> w{0.3, 0.2}, c{0.2, 0.0};
    const double x = 7.0;
    const double bw = std::log(x) - 0.06;
    auto g = train::glove_loss_grad(w, c, bw, 0.0, x, 100.0, 0.75);
    CHECK(g.loss == doctest::Approx(0.0).epsilon(1e-12));
    for (double v : g.grad_w) CHECK(v == doctest::Approx(0.0));
    CHECK(g.grad_bw == doctest::Approx(0.0));
  }
  SUBCASE("weight clamps at x_max") {
    std::vector<double> w{0.1}, c{0.2};
    auto a = train::glove_loss_grad(w, c, 0.0, 0.0, 200.0, 100.0, 0.75);
    const double r = 0.02 - std::log(200.0);
    CHECK(a.loss == doctest::Approx(r * r).epsilon(1e-12));
  }
  SUBCASE("non-positive count is rejected") {
    std::vector<double> w{0.1}, c{0.2};
    CHECK_THROWS_AS(train::glove_loss_grad(w, c, 0, 0, 0.0, 100, 0.75),
                    DataError);
  }
  SUBCASE("gradients match central finite differences") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t d = 1 + rng.next_below(6);
      std::vector<double> w(d), c(d);
      for (auto& v : w) v = rng.next_double() * 2.0 - 1.0;
      for (auto& v : c) v = rng.next_double() * 2.0 - 1.0;
      double bw = rng.next_double() - 0.5;
      double bc = rng.next_double() - 0.5;
      const double x = 0.1 + rng.next_double() * 300.0;
      auto loss_at = [&] {
        return train::glove_loss_grad(w, c, bw, bc, x, 100.0, 0.75).loss;
      };
      auto analytic = train::glove_loss_grad(w, c, bw, bc, x, 100.0, 0.75);

      for (std::size_t k = 0; k < d; ++k) {
        double& v = w[k];
        v += kFdStep;
        const double up = loss_at();
        v -= 2 * kFdStep;
        const double down = loss_at();
        v += kFdStep;
        CHECK(rel_err(analytic.grad_w[k], (up - down) / (2 * kFdStep)) < 1e-4);
      }
      bw += kFdStep;
      const double up = loss_at();
      bw -= 2 * kFdStep;
      const double down = loss_at();
      bw += kFdStep;
      CHECK(rel_err(analytic.grad_bw, (up - down) / (2 * kFdStep)) < 1e-4);
    }
  }
}

namespace {

// Central finite differences over every parameter a step touched,
// compared against the sparse analytic gradients.
void check_step_gradients(Word2VecModel& model, const train::StepGrads& grads,
                          const std::function<double()>& objective) {
  for (const auto& [row, grad] : grads.input)
    for (std::size_t k = 0; k < grad.size(); ++k) {
      double& v = model.input.at(row, k);
      v += kFdStep;
      const double up = objective();
      v -= 2 * kFdStep;
      const double down = objective();
      v += kFdStep;
      CHECK(rel_err(grad[k], (up - down) / (2 * kFdStep)) < 1e-4);
    }
  for (const auto& [row, grad] : grads.output)
    for (std::size_t k = 0; k < grad.size(); ++k) {
      double& v = model.output.at(row, k);
      v += kFdStep;
      const double up = objective();
      v -= 2 * kFdStep;
      const double down = objective();
      v += kFdStep;
      CHECK(rel_err(grad[k], (up - down) / (2 * kFdStep)) < 1e-4);
    }
  for (const auto& [row, grad] : grads.position)
    for (std::size_t k = 0; k < grad.size(); ++k) {
      double& v = model.position.at(row, k);
      v += kFdStep;
      const double up = objective();
      v -= 2 * kFdStep;
      const double down = objective();
      v += kFdStep;
      CHECK(rel_err(grad[k], (up - down) / (2 * kFdStep)) < 1e-4);
    }
}

}  // namespace

TEST_CASE("sg step gradients match finite differences") {
  auto v = test_vocab();
  Rng rng(13);
  SUBCASE("negative sampling, duplicate negative included") {
    auto model = train::init_word2vec(
        v, small_config(train::Model::kSg, train::Loss::kNegativeSampling));
    for (int trial = 0; trial < 10; ++trial) {
      randomize(model, rng);
      const std::uint32_t center = rng.next_below(v.size());
      const std::uint32_t context = rng.next_below(v.size());
      const std::vector<std::uint32_t> negatives{
          static_cast<std::uint32_t>(rng.next_below(v.size())), 3, 3};
      auto grads = train::sg_step_grads(model, center, context, negatives);
      check_step_gradients(model, grads, [&] {
        return train::sg_step_objective(model, center, context, negatives);
      });
    }
  }
  SUBCASE("hierarchical softmax") {
    auto model = train::init_word2vec(
        v, small_config(train::Model::kSg, train::Loss::kHierarchicalSoftmax));
    for (int trial = 0; trial < 10; ++trial) {
      randomize(model, rng);
      const std::uint32_t center = rng.next_below(v.size());
      const std::uint32_t context = rng.next_below(v.size());
      auto grads = train::sg_step_grads(model, center, context, {});
      check_step_gradients(model, grads, [&] {
        return train::sg_step_objective(model, center, context, {});
      });
    }
  }
}

TEST_CASE("cbow step gradients match finite differences") {
  auto v = test_vocab();
  Rng rng(17);
  SUBCASE("hierarchical softmax with position weights") {
    auto config = small_config(train::Model::kCbow,
                               train::Loss::kHierarchicalSoftmax);
    config.position_weights = true;
    auto model = train::init_word2vec(v, config);
    for (int trial = 0; trial < 10; ++trial) {
      randomize(model, rng);
      const std::vector<std::uint32_t> context{
          static_cast<std::uint32_t>(rng.next_below(v.size())),
          static_cast<std::uint32_t>(rng.next_below(v.size())),
          static_cast<std::uint32_t>(rng.next_below(v.size()))};
      const std::vector<int> rel_positions{-2, -1, 1};
      const std::uint32_t target = rng.next_below(v.size());
      auto grads = train::cbow_step_grads(model, context, rel_positions,
                                          target, {});
      CHECK_FALSE(grads.position.empty());
      check_step_gradients(model, grads, [&] {
        return train::cbow_step_objective(model, context, rel_positions,
                                          target, {});
      });
    }
  }
  SUBCASE("negative sampling, plain averaging") {
    auto model = train::init_word2vec(
        v, small_config(train::Model::kCbow, train::Loss::kNegativeSampling));
    for (int trial = 0; trial < 10; ++trial) {
      randomize(model, rng);
      const std::vector<std::uint32_t> context{
          static_cast<std::uint32_t>(rng.next_below(v.size())),
          static_cast<std::uint32_t>(rng.next_below(v.size()))};
      const std::vector<int> rel_positions{-1, 1};
      const std::uint32_t target = rng.next_below(v.size());
      const std::vector<std::uint32_t> negatives{
          static_cast<std::uint32_t>(rng.next_below(v.size())),
          static_cast<std::uint32_t>(rng.next_below(v.size()))};
      auto grads = train::cbow_step_grads(model, context, rel_positions,
                                          target, negatives);
      check_step_gradients(model, grads, [&] {
        return train::cbow_step_objective(model, context, rel_positions,
                                          target, negatives);
      });
    }
  }
}

TEST_CASE("position weights of one reduce cbow to plain averaging") {
  auto v = test_vocab();
  auto config =
      small_config(train::Model::kCbow, train::Loss::kHierarchicalSoftmax);
  auto plain_model = train::init_word2vec(v, config);
  config.position_weights = true;
  auto pw_model = train::init_word2vec(v, config);  // d_p starts at ones

  const std::vector<std::uint32_t> context{0, 2, 4};
  const std::vector<int> rel_positions{-2, 1, 3};
  auto plain = train::cbow_step_grads(plain_model, context, rel_positions, 1, {});
  auto pw = train::cbow_step_grads(pw_model, context, rel_positions, 1, {});
  CHECK(plain.objective == doctest::Approx(pw.objective).epsilon(1e-15));
  for (const auto& [row, grad] : plain.input) {
    REQUIRE(pw.input.count(row) == 1);
    for (std::size_t k = 0; k < grad.size(); ++k)
      CHECK(grad[k] == doctest::Approx(pw.input.at(row)[k]).epsilon(1e-15));
  }
}

TEST_CASE("two-word vocabulary reduces hs to one logistic node") {
  auto v = vocab::build_vocab(stream_of({{"a", "a", "b"}}), 1, std::nullopt,
                              1e-4);
  auto model = train::init_word2vec(
      v, small_config(train::Model::kCbow, train::Loss::kHierarchicalSoftmax));
  CHECK(model.tree.internal_nodes == 1);
  Rng rng(19);
  randomize(model, rng);
  const std::vector<std::uint32_t> context{1};
  const std::vector<int> rel{1};
  // Objective = log sigmoid(+-h.v) on the single internal node.
  std::vector<double> h = model.compose(1);
  const double s = dot(std::span<const double>(h), model.output.row(0));
  const double sign = model.tree.codes[0].bits[0] ? -1.0 : 1.0;
  const double expected = -std::log1p(std::exp(-sign * s));
  CHECK(train::cbow_step_objective(model, context, rel, 0, {}) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("sg_step ascends the objective") {
  auto v = test_vocab();
  auto model = train::init_word2vec(
      v, small_config(train::Model::kSg, train::Loss::kNegativeSampling));
  Rng rng(23);
  randomize(model, rng);
  vocab::NegativeTable table(v, 0.75);

  // sigma(s(w, c)) strictly increases for a small step.
  const std::uint32_t center = 0, context = 1;
  std::vector<double> h = model.compose(center);
  const double before = dot(std::span<const double>(h), model.output.row(context));
  train::sg_step(model, center, context, &table, 3, 1e-3, rng);
  h = model.compose(center);
  const double after = dot(std::span<const double>(h), model.output.row(context));
  CHECK(after > before);

  CHECK_THROWS_AS(train::sg_step(model, 0, 1, &table, 0, 1e-3, rng), DataError);
}

TEST_CASE("applied steps equal lr times the analytic gradients") {
  auto v = test_vocab();
  auto config = small_config(train::Model::kSg, train::Loss::kNegativeSampling);
  auto model = train::init_word2vec(v, config);
  Rng rng(29);
  randomize(model, rng);
  vocab::NegativeTable table(v, 0.75);
  const double lr = 0.05;

  // Duplicate the internal draw to learn which negatives the step pulls.
  Rng probe = rng;
  std::vector<std::uint32_t> negatives;
  for (int i = 0; i < config.negatives; ++i) {
    const std::uint32_t n = table.draw(probe);
    if (n != 1) negatives.push_back(n);
  }
  auto expected = train::sg_step_grads(model, 0, 1, negatives);

  Word2VecModel stepped = model;
  train::sg_step(stepped, 0, 1, &table, config.negatives, lr, rng);

  // Low bits may differ: the applied path accumulates duplicate-row
  // contributions sequentially, the sparse gradients sum them first.
  for (const auto& [row, grad] : expected.input)
    for (std::size_t k = 0; k < grad.size(); ++k)
      CHECK(stepped.input.at(row, k) ==
            doctest::Approx(model.input.at(row, k) + lr * grad[k])
                .epsilon(1e-11));
  for (const auto& [row, grad] : expected.output)
    for (std::size_t k = 0; k < grad.size(); ++k)
      CHECK(stepped.output.at(row, k) ==
            doctest::Approx(model.output.at(row, k) + lr * grad[k])
                .epsilon(1e-11));
}

TEST_CASE("micro-scale objective improves monotonically") {
  auto v = test_vocab();
  SUBCASE("sg with fixed negatives") {
    auto model = train::init_word2vec(
        v, small_config(train::Model::kSg, train::Loss::kNegativeSampling));
    const std::vector<std::uint32_t> negatives{2, 4, 5};
    double last = train::sg_step_objective(model, 0, 1, negatives);
    for (int step = 0; step < 100; ++step) {
      auto grads = train::sg_step_grads(model, 0, 1, negatives);
      for (const auto& [row, g] : grads.input)
        for (std::size_t k = 0; k < g.size(); ++k)
          model.input.at(row, k) += 1e-3 * g[k];
      for (const auto& [row, g] : grads.output)
        for (std::size_t k = 0; k < g.size(); ++k)
          model.output.at(row, k) += 1e-3 * g[k];
      const double now = train::sg_step_objective(model, 0, 1, negatives);
      CHECK(now >= last);
      last = now;
    }
  }
  SUBCASE("cbow under hierarchical softmax") {
    auto model = train::init_word2vec(
        v, small_config(train::Model::kCbow, train::Loss::kHierarchicalSoftmax));
    const std::vector<std::uint32_t> context{2, 3};
    const std::vector<int> rel{-1, 1};
    Rng rng(31);
    double last = train::cbow_step_objective(model, context, rel, 0, {});
    for (int step = 0; step < 100; ++step) {
      train::cbow_step(model, context, rel, 0, nullptr, 0, 1e-3, rng);
      const double now = train::cbow_step_objective(model, context, rel, 0, {});
      CHECK(now >= last);
      last = now;
    }
  }
  SUBCASE("glove single entry under plain descent") {
    std::vector<double> w{0.3, -0.2}, c{0.1, 0.4};
    double bw = 0.05, bc = -0.03;
    const double x = 12.0;
    double last =
        train::glove_loss_grad(w, c, bw, bc, x, 100.0, 0.75).loss;
    for (int step = 0; step < 100; ++step) {
      auto g = train::glove_loss_grad(w, c, bw, bc, x, 100.0, 0.75);
      for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] -= 1e-3 * g.grad_w[k];
        c[k] -= 1e-3 * g.grad_c[k];
      }
      bw -= 1e-3 * g.grad_bw;
      bc -= 1e-3 * g.grad_bc;
      const double now =
          train::glove_loss_grad(w, c, bw, bc, x, 100.0, 0.75).loss;
      CHECK(now <= last);
      last = now;
    }
  }
}

TEST_CASE("training loop replays through the public step functions") {
  const std::vector<std::string> sentence{"word0", "word1", "word2",
                                          "word3", "word1"};
  auto stream = stream_of({sentence});
  // Threshold far above every frequency so no token is discarded and the
  // replay exercises real steps.
  auto v = vocab::build_vocab(stream, 1, std::nullopt, 10.0);

  auto run_both = [&](train::Model m, train::Loss l, bool pos_weights) {
    auto config = small_config(m, l);
    config.position_weights = pos_weights;
    config.epochs = 1;
    config.t = 1e-4;
    auto trained = train::train_word2vec(stream, v, config);

    // Replay: same rng stream, same order of draws.
    auto model = train::init_word2vec(v, config);
    std::optional<vocab::NegativeTable> table;
    if (config.effective_loss() == train::Loss::kNegativeSampling)
      table.emplace(v, config.unigram_power);
    Rng rng(config.seed);
    std::vector<std::uint32_t> reduced;
    for (const auto& token : sentence) {
      const auto id = static_cast<std::uint32_t>(v.id(token));
      if (!(rng.next_double() < v.discard_prob[id])) reduced.push_back(id);
    }
    const auto n = static_cast<std::ptrdiff_t>(reduced.size());
    for (std::ptrdiff_t pos = 0; pos < n; ++pos) {
      const int b = train::dynamic_window(config.ws, rng);
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, pos - b);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, pos + b);
      if (m == train::Model::kSg) {
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
          if (j == pos) continue;
          train::sg_step(model, reduced[pos], reduced[j],
                         table ? &*table : nullptr, config.negatives,
                         config.lr, rng);
        }
      } else {
        std::vector<std::uint32_t> context;
        std::vector<int> rel;
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
          if (j == pos) continue;
          context.push_back(reduced[j]);
          rel.push_back(static_cast<int>(j - pos));
        }
        if (context.empty()) continue;
        train::cbow_step(model, context, rel, reduced[pos],
                         table ? &*table : nullptr, config.negatives,
                         config.lr, rng);
      }
    }
    auto replayed = train::export_word2vec(model, v);
    REQUIRE(replayed.vectors.data().size() ==
            trained.embedding.vectors.data().size());
    for (std::size_t i = 0; i < replayed.vectors.data().size(); ++i)
      CHECK(replayed.vectors.data()[i] == trained.embedding.vectors.data()[i]);
  };

  run_both(train::Model::kSg, train::Loss::kNegativeSampling, false);
  run_both(train::Model::kSg, train::Loss::kHierarchicalSoftmax, false);
  run_both(train::Model::kCbow, train::Loss::kHierarchicalSoftmax, false);
  run_both(train::Model::kCbow, train::Loss::kNegativeSampling, true);
}

namespace {

// Sentences drawn from one of four disjoint topic blocks.
textpipe::TokenStream topic_corpus(std::size_t total_tokens, Rng& rng) {
  std::vector<std::vector<std::string>> sentences;
  std::size_t emitted = 0;
  while (emitted < total_tokens) {
    const auto block = rng.next_below(4);
    std::vector<std::string> sentence;
    for (int i = 0; i < 20; ++i)
      sentence.push_back("t" + std::to_string(block) + "_" +
                         std::to_string(rng.next_below(25)));
    emitted += sentence.size();
    sentences.push_back(std::move(sentence));
  }
  return stream_of(std::move(sentences));
}

// Mean cosine within blocks minus mean cosine across blocks.
double topic_separation(const Embedding& e) {
  double intra = 0.0, inter = 0.0;
  std::size_t n_intra = 0, n_inter = 0;
  for (std::size_t a = 0; a < e.size(); ++a)
    for (std::size_t b = a + 1; b < e.size(); ++b) {
      const double cs = eval::cosine(e.vectors.row(a), e.vectors.row(b));
      if (e.tokens[a][1] == e.tokens[b][1]) {
        intra += cs;
        ++n_intra;
      } else {
        inter += cs;
        ++n_inter;
      }
    }
  return intra / static_cast<double>(n_intra) -
         inter / static_cast<double>(n_inter);
}

}  // namespace

TEST_CASE("train_word2vec separates synthetic topics") {
  Rng corpus_rng(97);
  auto stream = topic_corpus(20000, corpus_rng);
  auto v = vocab::build_vocab(stream, 1, std::nullopt, 1e-2);

  TrainConfig config = small_config(train::Model::kSg,
                                    train::Loss::kNegativeSampling);
  config.dim = 16;
  config.epochs = 3;
  config.ws = 4;
  config.negatives = 4;
  config.lr = 0.05;
  config.maxn = 0;  // plain word vectors; the oracle targets the dynamics
  config.seed = 5;
  auto result = train::train_word2vec(stream, v, config);
  CHECK(topic_separation(result.embedding) > 0.2);
}

TEST_CASE("fixed seed and one worker give bit-identical output") {
  Rng corpus_rng(53);
  auto stream = topic_corpus(3000, corpus_rng);
  auto v = vocab::build_vocab(stream, 1, std::nullopt, 1e-3);
  auto config = small_config(train::Model::kCbow,
                             train::Loss::kHierarchicalSoftmax);
  config.epochs = 2;
  config.seed = 7;
  auto a = train::train_word2vec(stream, v, config);
  auto b = train::train_word2vec(stream, v, config);
  REQUIRE(a.embedding.vectors.data().size() ==
          b.embedding.vectors.data().size());
  for (std::size_t i = 0; i < a.embedding.vectors.data().size(); ++i)
    CHECK(a.embedding.vectors.data()[i] == b.embedding.vectors.data()[i]);
  CHECK(a.epoch_loss == b.epoch_loss);
}

TEST_CASE("multi-worker training keeps parameters finite") {
  Rng corpus_rng(59);
  auto stream = topic_corpus(3000, corpus_rng);
  auto v = vocab::build_vocab(stream, 1, std::nullopt, 1e-3);
  auto config = small_config(train::Model::kSg, train::Loss::kNegativeSampling);
  config.epochs = 2;
  config.workers = 2;
  auto result = train::train_word2vec(stream, v, config);
  for (double x : result.embedding.vectors.data()) CHECK(std::isfinite(x));

  config.model = train::Model::kGlove;
  auto cooc = train::build_cooccurrence(stream, v, config.ws);
  auto glove = train::train_glove(cooc, v, config);
  for (double x : glove.embedding.vectors.data()) CHECK(std::isfinite(x));
}

TEST_CASE("sub-sampling retention tracks 1 - discard_prob during training") {
  // One frequent word among fillers; t chosen so its discard prob is ~0.5.
  std::vector<std::vector<std::string>> sentences;
  Rng gen(61);
  for (int s = 0; s < 800; ++s) {
    std::vector<std::string> sentence;
    for (int i = 0; i < 25; ++i)
      sentence.push_back(gen.next_below(5) == 0
                             ? "hot"
                             : "w" + std::to_string(gen.next_below(40)));
    sentences.push_back(std::move(sentence));
  }
  auto stream = stream_of(sentences);
  auto v = vocab::build_vocab(stream, 1, std::nullopt, 5e-2);
  const double p = v.discard_prob[v.id("hot")];
  REQUIRE(p > 0.1);

  auto config = small_config(train::Model::kSg, train::Loss::kNegativeSampling);
  config.epochs = 1;
  config.minn = 1;
  config.maxn = 0;  // plain word rows keep this test quick
  auto result = train::train_word2vec(stream, v, config);
  const auto id = static_cast<std::size_t>(v.id("hot"));
  const double retention = static_cast<double>(result.kept[id]) /
                           static_cast<double>(result.scheduled[id]);
  CHECK(std::abs(retention - (1.0 - p)) < 0.02);
  CHECK(result.scheduled[id] == v.counts[id]);
}

TEST_CASE("a huge threshold disables sub-sampling entirely") {
  auto v = test_vocab();
  const std::vector<std::string> sentence{"word0", "word1", "word2", "word0"};
  auto stream = stream_of({sentence});
  auto config = small_config(train::Model::kSg, train::Loss::kNegativeSampling);
  config.epochs = 3;
  // Rebuild the vocabulary with a threshold far above every frequency.
  auto loose = vocab::build_vocab(stream, 1, std::nullopt, 1e9);
  for (double p : loose.discard_prob) CHECK(p == 0.0);
  auto result = train::train_word2vec(stream, loose, config);
  for (std::size_t w = 0; w < loose.size(); ++w) {
    CHECK(result.scheduled[w] ==
          loose.counts[w] * static_cast<std::uint64_t>(config.epochs));
    CHECK(result.kept[w] == result.scheduled[w]);
  }
}

TEST_CASE("train_glove") {
  SUBCASE("two alternating words end up similar") {
    std::vector<std::string> tokens;
    for (int i = 0; i < 500; ++i) {
      tokens.push_back("a");
      tokens.push_back("b");
    }
    // A few extra words so cosine against an unrelated vector is testable.
    std::vector<std::string> filler;
    for (int i = 0; i < 40; ++i) {
      filler.push_back("x" + std::to_string(i % 8));
      filler.push_back("y" + std::to_string((i * 3) % 8));
    }
    auto stream = stream_of({tokens, filler});
    auto v = vocab::build_vocab(stream, 1, std::nullopt, 1e-4);
    int wins = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      TrainConfig config;
      config.model = train::Model::kGlove;
      config.dim = 5;
      config.epochs = 30;
      config.lr = 0.05;
      config.ws = 7;
      config.seed = seed;
      auto cooc = train::build_cooccurrence(stream, v, config.ws);
      auto result = train::train_glove(cooc, v, config);
      const auto& e = result.embedding;
      const double ab =
          eval::cosine(e.vectors.row(e.id("a")), e.vectors.row(e.id("b")));
      const double ax =
          eval::cosine(e.vectors.row(e.id("a")), e.vectors.row(e.id("x3")));
      if (ab > ax) ++wins;
    }
    CHECK(wins == 10);
  }
  SUBCASE("epoch loss is non-increasing over the later epochs") {
    Rng corpus_rng(67);
    auto stream = topic_corpus(8000, corpus_rng);
    auto v = vocab::build_vocab(stream, 1, std::nullopt, 1e-4);
    TrainConfig config;
    config.model = train::Model::kGlove;
    config.dim = 8;
    config.epochs = 20;
    config.lr = 0.05;
    config.seed = 3;
    auto cooc = train::build_cooccurrence(stream, v, config.ws);
    auto result = train::train_glove(cooc, v, config);
    for (std::size_t e = result.epoch_loss.size() / 2;
         e + 1 < result.epoch_loss.size(); ++e)
      CHECK(result.epoch_loss[e + 1] <= result.epoch_loss[e] * 1.01);
  }
  SUBCASE("single entry converges to near-zero residual") {
    vocab::Vocabulary v;
    v.tokens = {"a", "b"};
    v.counts = {1, 1};
    v.discard_prob = {0.0, 0.0};
    v.total_tokens = 2;
    v.id_of = {{"a", 0}, {"b", 1}};
    train::CoocMatrix cooc;
    cooc.add(0, 1, 5.0);
    TrainConfig config;
    config.model = train::Model::kGlove;
    config.dim = 1;
    config.epochs = 200;
    config.lr = 0.25;
    config.seed = 11;
    auto result = train::train_glove(cooc, v, config);
    // Epoch loss is f(x) r^2, so the residual at the last epoch is
    // sqrt(loss / f).
    const double f = std::min(1.0, std::pow(5.0 / config.x_max, config.alpha));
    CHECK(std::sqrt(result.epoch_loss.back() / f) < 1e-3);
  }
  SUBCASE("empty matrix is an error") {
    train::CoocMatrix cooc;
    auto v = test_vocab();
    TrainConfig config;
    config.model = train::Model::kGlove;
    CHECK_THROWS_AS(train::train_glove(cooc, v, config), DataError);
  }
}
