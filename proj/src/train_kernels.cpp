#include <algorithm>
#include <cmath>

#include "embedkit/errors.hpp"
#include "embedkit/train.hpp"

namespace embedkit::train {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(sigmoid(x)) without overflow on either tail.
double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

std::vector<double>& grad_row(
    std::unordered_map<std::uint32_t, std::vector<double>>& grads,
    std::uint32_t row, std::size_t dim) {
  auto [it, inserted] = grads.try_emplace(row);
  if (inserted) it->second.assign(dim, 0.0);
  return it->second;
}

}  // namespace

int dynamic_window(int ws, Rng& rng) {
  if (ws < 1) throw DataError("window size must be >= 1");
  return 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(ws)));
}

GloveGrad glove_loss_grad(std::span<const double> w, std::span<const double> c,
                          double bw, double bc, double x, double x_max,
                          double alpha) {
  if (x <= 0.0) throw DataError("co-occurrence weight must be positive");
  const std::size_t d = w.size();
  const double weight = std::min(1.0, std::pow(x / x_max, alpha));
  const double residual = dot(w, c) + bw + bc - std::log(x);

  GloveGrad g;
  g.loss = weight * residual * residual;
  const double scale = 2.0 * weight * residual;
  g.grad_w.resize(d);
  g.grad_c.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    g.grad_w[i] = scale * c[i];
    g.grad_c[i] = scale * w[i];
  }
  g.grad_bw = scale;
  g.grad_bc = scale;
  return g;
}

double ns_objective(std::span<const double> h, std::span<const double> v_pos,
                    const std::vector<std::span<const double>>& v_neg) {
  double obj = log_sigmoid(dot(h, v_pos));
  for (const auto& v : v_neg) obj += log_sigmoid(-dot(h, v));
  return obj;
}

double hs_objective(std::span<const double> h,
                    const std::vector<std::span<const double>>& nodes,
                    std::span<const std::uint8_t> bits) {
  double obj = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double sign = bits[i] ? -1.0 : 1.0;
    obj += log_sigmoid(sign * dot(h, nodes[i]));
  }
  return obj;
}

std::size_t Word2VecModel::position_row(int p) const {
  if (p == 0 || p < -ws || p > ws)
    throw DataError("relative position outside the context window");
  return p < 0 ? static_cast<std::size_t>(p + ws)
               : static_cast<std::size_t>(ws + p - 1);
}

std::vector<double> Word2VecModel::compose(std::uint32_t word) const {
  std::vector<double> h(static_cast<std::size_t>(dim), 0.0);
  for (std::uint32_t row : rows_of_word[word])
    axpy(1.0, input.row(row), h);
  return h;
}

Word2VecModel init_word2vec(const vocab::Vocabulary& vocab,
                            const TrainConfig& config) {
  Word2VecModel model;
  model.vocab_size = vocab.size();
  model.dim = config.dim;
  model.ws = config.ws;
  model.loss = config.effective_loss();
  model.position_weights =
      config.position_weights && config.model == Model::kCbow;
  model.subword = {config.minn, config.maxn, config.n_buckets};

  const std::size_t v = vocab.size();
  const bool subword = model.subword.enabled();
  const std::size_t input_rows = v + (subword ? config.n_buckets : 0);
  model.input = Matrix(input_rows, static_cast<std::size_t>(config.dim));
  Rng rng(config.seed);
  for (double& x : model.input.data())
    x = (rng.next_double() - 0.5) / config.dim;

  if (model.loss == Loss::kHierarchicalSoftmax) {
    model.tree = vocab::build_huffman(vocab);
    model.output = Matrix(v - 1, static_cast<std::size_t>(config.dim));
  } else {
    model.output = Matrix(v, static_cast<std::size_t>(config.dim));
  }
  if (model.position_weights)
    model.position = Matrix(2 * static_cast<std::size_t>(config.ws),
                            static_cast<std::size_t>(config.dim), 1.0);

  model.rows_of_word.resize(v);
  for (std::uint32_t w = 0; w < v; ++w) {
    auto& rows = model.rows_of_word[w];
    rows.push_back(w);
    if (subword)
      for (const auto& gram :
           vocab::char_ngrams(vocab.tokens[w], config.minn, config.maxn))
        rows.push_back(static_cast<std::uint32_t>(v) +
                       vocab::hash_ngram(gram, model.subword));
  }
  return model;
}

namespace {

// Output-side objective and gradients for a fixed hidden vector. Fills
// grad_h (dObj/dh) and the output-row gradients in `grads` when non-null.
double output_objective_grad(const Word2VecModel& model,
                             std::span<const double> h, std::uint32_t target,
                             std::span<const std::uint32_t> negatives,
                             std::vector<double>* grad_h, StepGrads* grads) {
  const auto dim = static_cast<std::size_t>(model.dim);
  double obj = 0.0;
  if (grad_h) grad_h->assign(dim, 0.0);

  if (model.loss == Loss::kHierarchicalSoftmax) {
    const auto& code = model.tree.codes[target];
    for (std::size_t i = 0; i < code.path.size(); ++i) {
      const std::uint32_t node = code.path[i];
      const double sign = code.bits[i] ? -1.0 : 1.0;
      const double s = dot(h, model.output.row(node));
      obj += log_sigmoid(sign * s);
      const double d_obj_ds = sign * sigmoid(-sign * s);
      if (grad_h) axpy(d_obj_ds, model.output.row(node), *grad_h);
      if (grads) axpy(d_obj_ds, h, std::span<double>(grad_row(grads->output, node, dim)));
    }
  } else {
    const double s_pos = dot(h, model.output.row(target));
    obj += log_sigmoid(s_pos);
    const double d_pos = 1.0 - sigmoid(s_pos);
    if (grad_h) axpy(d_pos, model.output.row(target), *grad_h);
    if (grads) axpy(d_pos, h, std::span<double>(grad_row(grads->output, target, dim)));
    for (std::uint32_t neg : negatives) {
      const double s_neg = dot(h, model.output.row(neg));
      obj += log_sigmoid(-s_neg);
      const double d_neg = -sigmoid(s_neg);
      if (grad_h) axpy(d_neg, model.output.row(neg), *grad_h);
      if (grads) axpy(d_neg, h, std::span<double>(grad_row(grads->output, neg, dim)));
    }
  }
  return obj;
}

}  // namespace

double sg_step_objective(const Word2VecModel& model, std::uint32_t center,
                         std::uint32_t context,
                         std::span<const std::uint32_t> negatives) {
  const std::vector<double> h = model.compose(center);
  return output_objective_grad(model, h, context, negatives, nullptr, nullptr);
}

StepGrads sg_step_grads(const Word2VecModel& model, std::uint32_t center,
                        std::uint32_t context,
                        std::span<const std::uint32_t> negatives) {
  const auto dim = static_cast<std::size_t>(model.dim);
  StepGrads grads;
  const std::vector<double> h = model.compose(center);
  std::vector<double> grad_h;
  grads.objective =
      output_objective_grad(model, h, context, negatives, &grad_h, &grads);
  for (std::uint32_t row : model.rows_of_word[center])
    axpy(1.0, grad_h, std::span<double>(grad_row(grads.input, row, dim)));
  return grads;
}

namespace {

// Hidden vector for a CBoW window plus the per-word compositions.
std::vector<double> cbow_hidden(const Word2VecModel& model,
                                std::span<const std::uint32_t> context,
                                std::span<const int> rel_positions,
                                std::vector<std::vector<double>>* u_out) {
  const auto dim = static_cast<std::size_t>(model.dim);
  const double inv_m = 1.0 / static_cast<double>(context.size());
  std::vector<double> h(dim, 0.0);
  for (std::size_t j = 0; j < context.size(); ++j) {
    std::vector<double> u = model.compose(context[j]);
    if (model.position_weights) {
      const auto d_p = model.position.row(model.position_row(rel_positions[j]));
      for (std::size_t i = 0; i < dim; ++i) h[i] += inv_m * d_p[i] * u[i];
    } else {
      axpy(inv_m, u, std::span<double>(h));
    }
    if (u_out) u_out->push_back(std::move(u));
  }
  return h;
}

}  // namespace

double cbow_step_objective(const Word2VecModel& model,
                           std::span<const std::uint32_t> context,
                           std::span<const int> rel_positions,
                           std::uint32_t target,
                           std::span<const std::uint32_t> negatives) {
  if (context.empty()) throw DataError("CBoW step needs a non-empty context");
  const std::vector<double> h =
      cbow_hidden(model, context, rel_positions, nullptr);
  return output_objective_grad(model, h, target, negatives, nullptr, nullptr);
}

StepGrads cbow_step_grads(const Word2VecModel& model,
                          std::span<const std::uint32_t> context,
                          std::span<const int> rel_positions,
                          std::uint32_t target,
                          std::span<const std::uint32_t> negatives) {
  if (context.empty()) throw DataError("CBoW step needs a non-empty context");
  const auto dim = static_cast<std::size_t>(model.dim);
  const double inv_m = 1.0 / static_cast<double>(context.size());

  StepGrads grads;
  std::vector<std::vector<double>> u;
  u.reserve(context.size());
  const std::vector<double> h = cbow_hidden(model, context, rel_positions, &u);
  std::vector<double> grad_h;
  grads.objective =
      output_objective_grad(model, h, target, negatives, &grad_h, &grads);

  for (std::size_t j = 0; j < context.size(); ++j) {
    if (model.position_weights) {
      const std::size_t prow = model.position_row(rel_positions[j]);
      const auto d_p = model.position.row(prow);
      auto& gd = grad_row(grads.position, static_cast<std::uint32_t>(prow), dim);
      std::vector<double> du(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        du[i] = inv_m * d_p[i] * grad_h[i];
        gd[i] += inv_m * u[j][i] * grad_h[i];
      }
      for (std::uint32_t row : model.rows_of_word[context[j]])
        axpy(1.0, du, std::span<double>(grad_row(grads.input, row, dim)));
    } else {
      for (std::uint32_t row : model.rows_of_word[context[j]])
        axpy(inv_m, grad_h, std::span<double>(grad_row(grads.input, row, dim)));
    }
  }
  return grads;
}

namespace {

// Reused per-thread buffers; the applied steps below are allocation-free
// after warmup.
struct Workspace {
  std::vector<double> h, grad_h, du;
  std::vector<std::vector<double>> u;
  std::vector<std::uint32_t> negatives;
  std::vector<std::uint32_t> out_rows;
  std::vector<double> out_scales;
};

Workspace& workspace(std::size_t dim) {
  thread_local Workspace ws;
  ws.h.assign(dim, 0.0);
  ws.grad_h.assign(dim, 0.0);
  ws.du.assign(dim, 0.0);
  return ws;
}

void draw_negatives(const vocab::NegativeTable* table, int k,
                    std::uint32_t positive, Rng& rng,
                    std::vector<std::uint32_t>& out) {
  out.clear();
  if (table == nullptr) throw DataError("negative sampling needs a noise table");
  if (k < 1) throw DataError("negative sampling needs k >= 1");
  for (int i = 0; i < k; ++i) {
    const std::uint32_t n = table->draw(rng);
    if (n != positive) out.push_back(n);
  }
}

// Output-side pass with batch semantics: every dot is taken at the
// pre-step parameter values, then each touched row is updated once with
// its summed coefficient. Fills ws.grad_h with dObj/dh.
double output_pass(Word2VecModel& model, Workspace& ws, std::uint32_t target,
                   double lr) {
  ws.out_rows.clear();
  ws.out_scales.clear();
  double obj = 0.0;

  auto add_row = [&](std::uint32_t row, double scale) {
    for (std::size_t i = 0; i < ws.out_rows.size(); ++i)
      if (ws.out_rows[i] == row) {
        ws.out_scales[i] += scale;
        return;
      }
    ws.out_rows.push_back(row);
    ws.out_scales.push_back(scale);
  };

  if (model.loss == Loss::kHierarchicalSoftmax) {
    const auto& code = model.tree.codes[target];
    for (std::size_t i = 0; i < code.path.size(); ++i) {
      const double sign = code.bits[i] ? -1.0 : 1.0;
      const double s = dot(ws.h, model.output.row(code.path[i]));
      obj += log_sigmoid(sign * s);
      add_row(code.path[i], sign * sigmoid(-sign * s));
    }
  } else {
    const double s_pos = dot(ws.h, model.output.row(target));
    obj += log_sigmoid(s_pos);
    add_row(target, 1.0 - sigmoid(s_pos));
    for (std::uint32_t neg : ws.negatives) {
      const double s_neg = dot(ws.h, model.output.row(neg));
      obj += log_sigmoid(-s_neg);
      add_row(neg, -sigmoid(s_neg));
    }
  }

  std::fill(ws.grad_h.begin(), ws.grad_h.end(), 0.0);
  for (std::size_t i = 0; i < ws.out_rows.size(); ++i) {
    auto row = model.output.row(ws.out_rows[i]);
    axpy(ws.out_scales[i], row, std::span<double>(ws.grad_h));
    axpy(lr * ws.out_scales[i], ws.h, row);
  }
  return obj;
}

void compose_into(const Word2VecModel& model, std::uint32_t word,
                  std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::uint32_t row : model.rows_of_word[word])
    axpy(1.0, model.input.row(row), std::span<double>(out));
}

}  // namespace

double sg_step(Word2VecModel& model, std::uint32_t center,
               std::uint32_t context, const vocab::NegativeTable* table, int k,
               double lr, Rng& rng) {
  Workspace& ws = workspace(static_cast<std::size_t>(model.dim));
  ws.negatives.clear();
  if (model.loss == Loss::kNegativeSampling)
    draw_negatives(table, k, context, rng, ws.negatives);
  compose_into(model, center, ws.h);
  const double obj = output_pass(model, ws, context, lr);
  for (std::uint32_t row : model.rows_of_word[center])
    axpy(lr, ws.grad_h, model.input.row(row));
  return obj;
}

double cbow_step(Word2VecModel& model, std::span<const std::uint32_t> context,
                 std::span<const int> rel_positions, std::uint32_t target,
                 const vocab::NegativeTable* table, int k, double lr,
                 Rng& rng) {
  if (context.empty()) throw DataError("CBoW step needs a non-empty context");
  const std::size_t m = context.size();
  const double inv_m = 1.0 / static_cast<double>(m);
  const auto dim = static_cast<std::size_t>(model.dim);

  Workspace& ws = workspace(dim);
  ws.negatives.clear();
  if (model.loss == Loss::kNegativeSampling)
    draw_negatives(table, k, target, rng, ws.negatives);

  while (ws.u.size() < m) ws.u.emplace_back();
  for (std::size_t j = 0; j < m; ++j) {
    ws.u[j].assign(dim, 0.0);
    compose_into(model, context[j], ws.u[j]);
    if (model.position_weights) {
      const auto d_p = model.position.row(model.position_row(rel_positions[j]));
      for (std::size_t i = 0; i < dim; ++i)
        ws.h[i] += inv_m * d_p[i] * ws.u[j][i];
    } else {
      axpy(inv_m, ws.u[j], std::span<double>(ws.h));
    }
  }

  const double obj = output_pass(model, ws, target, lr);

  for (std::size_t j = 0; j < m; ++j) {
    if (model.position_weights) {
      const std::size_t prow = model.position_row(rel_positions[j]);
      const auto d_p = model.position.row(prow);
      for (std::size_t i = 0; i < dim; ++i)
        ws.du[i] = inv_m * d_p[i] * ws.grad_h[i];
      for (std::uint32_t row : model.rows_of_word[context[j]])
        axpy(lr, ws.du, model.input.row(row));
      // One word per relative position, so updating d_p in place after the
      // hidden pass applies the whole-step gradient.
      auto d_p_mut = model.position.row(prow);
      for (std::size_t i = 0; i < dim; ++i)
        d_p_mut[i] += lr * inv_m * ws.u[j][i] * ws.grad_h[i];
    } else {
      for (std::uint32_t row : model.rows_of_word[context[j]])
        axpy(inv_m * lr, ws.grad_h, model.input.row(row));
    }
  }
  return obj;
}

Embedding export_word2vec(const Word2VecModel& model,
                          const vocab::Vocabulary& vocab) {
  Embedding embedding;
  embedding.tokens = vocab.tokens;
  embedding.vectors =
      Matrix(vocab.size(), static_cast<std::size_t>(model.dim));
  for (std::uint32_t w = 0; w < vocab.size(); ++w) {
    std::vector<double> sum = model.compose(w);
    const double inv = 1.0 / static_cast<double>(model.rows_of_word[w].size());
    auto row = embedding.vectors.row(w);
    for (std::size_t i = 0; i < sum.size(); ++i) row[i] = sum[i] * inv;
  }
  embedding.build_index();
  return embedding;
}

}  // namespace embedkit::train
