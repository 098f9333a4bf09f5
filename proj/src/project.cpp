#include "embedkit/project.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "embedkit/errors.hpp"
#include "embedkit/eval.hpp"
#include "embedkit/rng.hpp"

namespace embedkit::project {
namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
// eigenvalues and fills `vectors` with column eigenvectors.
std::vector<double> jacobi_eigen(Matrix a, Matrix& vectors) {
  const std::size_t n = a.rows();
  vectors = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) vectors.at(i, i) = 1.0;

  for (int sweep = 0; sweep < 128; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
    if (off < 1e-26) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a.at(k, p);
          const double akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a.at(p, k);
          const double aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = vectors.at(k, p);
          const double vkq = vectors.at(k, q);
          vectors.at(k, p) = c * vkp - s * vkq;
          vectors.at(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a.at(i, i);
  return values;
}

Matrix squared_distances(const Matrix& x) {
  const std::size_t n = x.rows();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      auto ri = x.row(i);
      auto rj = x.row(j);
      for (std::size_t k = 0; k < x.cols(); ++k) {
        const double diff = ri[k] - rj[k];
        s += diff * diff;
      }
      d.at(i, j) = s;
      d.at(j, i) = s;
    }
  return d;
}

double row_perplexity(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log2(p);
  return std::exp2(h);
}

}  // namespace

Matrix pca_reduce(const Matrix& x, std::size_t d) {
  const std::size_t n = x.rows();
  const std::size_t dims = x.cols();
  if (n < 2) throw DataError("PCA needs at least 2 points");
  if (d > std::min(n, dims))
    throw DataError("PCA target dimension exceeds min(n, D)");

  std::vector<double> mean(dims, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    axpy(1.0, x.row(i), std::span<double>(mean));
  for (double& m : mean) m /= static_cast<double>(n);

  Matrix centered(n, dims);
  for (std::size_t i = 0; i < n; ++i) {
    auto src = x.row(i);
    auto dst = centered.row(i);
    for (std::size_t k = 0; k < dims; ++k) dst[k] = src[k] - mean[k];
  }

  Matrix cov(dims, dims);
  for (std::size_t a = 0; a < dims; ++a)
    for (std::size_t b = a; b < dims; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        s += centered.at(i, a) * centered.at(i, b);
      s /= static_cast<double>(n - 1);
      cov.at(a, b) = s;
      cov.at(b, a) = s;
    }

  Matrix vectors;
  const std::vector<double> values = jacobi_eigen(std::move(cov), vectors);
  std::vector<std::size_t> order(dims);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] > values[b];
  });

  Matrix coords(n, d);
  for (std::size_t c = 0; c < d; ++c) {
    const std::size_t col = order[c];
    // Orient: largest-magnitude component positive.
    std::size_t arg = 0;
    for (std::size_t k = 1; k < dims; ++k)
      if (std::abs(vectors.at(k, col)) > std::abs(vectors.at(arg, col))) arg = k;
    const double sign = vectors.at(arg, col) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < dims; ++k)
        s += centered.at(i, k) * vectors.at(k, col);
      coords.at(i, c) = sign * s;
    }
  }
  return coords;
}

std::vector<double> perplexity_calibrate(std::span<const double> sq_distances,
                                         double target_ppl) {
  const std::size_t n = sq_distances.size();
  if (n == 0) throw DataError("perplexity calibration over an empty row");
  if (target_ppl < 1.0 || target_ppl > static_cast<double>(n))
    throw DataError("perplexity target not achievable for this row");

  const double min_d =
      *std::min_element(sq_distances.begin(), sq_distances.end());
  const double max_d =
      *std::max_element(sq_distances.begin(), sq_distances.end());

  std::vector<double> probs(n);
  auto fill = [&](double beta) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      probs[i] = std::exp(-beta * (sq_distances[i] - min_d));
      sum += probs[i];
    }
    for (double& p : probs) p /= sum;
  };

  if (max_d == min_d) {  // equidistant: uniform at any bandwidth
    fill(0.0);
    return probs;
  }

  double lo = 0.0, hi = 1.0;
  fill(hi);
  while (row_perplexity(probs) > target_ppl) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e200) break;
    fill(hi);
  }
  for (int step = 0; step < 200; ++step) {
    const double beta = 0.5 * (lo + hi);
    fill(beta);
    const double ppl = row_perplexity(probs);
    if (std::abs(ppl - target_ppl) <= 1e-3) return probs;
    (ppl > target_ppl ? lo : hi) = beta;
  }
  throw DataError("perplexity calibration did not converge in 200 steps");
}

Matrix joint_affinities(const Matrix& x, double target_ppl) {
  const std::size_t n = x.rows();
  const Matrix d = squared_distances(x);
  Matrix cond(n, n);
  std::vector<double> row(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) row[k++] = d.at(i, j);
    const std::vector<double> probs = perplexity_calibrate(row, target_ppl);
    k = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) cond.at(i, j) = probs[k++];
  }
  Matrix joint(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      joint.at(i, j) =
          (cond.at(i, j) + cond.at(j, i)) / (2.0 * static_cast<double>(n));
  return joint;
}

namespace {

// Unnormalized Student-t kernel and its normalizer.
double fill_q_tilde(const Matrix& y, Matrix& q_tilde) {
  const std::size_t n = y.rows();
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < y.cols(); ++k) {
        const double diff = y.at(i, k) - y.at(j, k);
        s += diff * diff;
      }
      const double q = 1.0 / (1.0 + s);
      q_tilde.at(i, j) = q;
      q_tilde.at(j, i) = q;
      z += 2.0 * q;
    }
  return z;
}

double kl_given(const Matrix& p, const Matrix& q_tilde, double z) {
  const std::size_t n = p.rows();
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double pij = p.at(i, j);
      if (pij <= 0.0) continue;
      const double qij = std::max(q_tilde.at(i, j) / z, 1e-12);
      kl += pij * std::log(pij / qij);
    }
  return std::max(0.0, kl);
}

// dKL/dy with P scaled by `exaggeration`.
void grad_given(const Matrix& p, const Matrix& y, const Matrix& q_tilde,
                double z, double exaggeration, Matrix& grad) {
  const std::size_t n = y.rows();
  const std::size_t dims = y.cols();
  for (double& g : grad.data()) g = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double mult =
          (exaggeration * p.at(i, j) - q_tilde.at(i, j) / z) * q_tilde.at(i, j);
      for (std::size_t k = 0; k < dims; ++k)
        grad.at(i, k) += 4.0 * mult * (y.at(i, k) - y.at(j, k));
    }
}

}  // namespace

double tsne_kl(const Matrix& p, const Matrix& y) {
  Matrix q_tilde(y.rows(), y.rows());
  const double z = fill_q_tilde(y, q_tilde);
  return kl_given(p, q_tilde, z);
}

Matrix tsne_kl_grad(const Matrix& p, const Matrix& y) {
  Matrix q_tilde(y.rows(), y.rows());
  const double z = fill_q_tilde(y, q_tilde);
  Matrix grad(y.rows(), y.cols());
  grad_given(p, y, q_tilde, z, 1.0, grad);
  return grad;
}

TsneResult tsne(const Matrix& x, const ProjectionConfig& config) {
  const std::size_t n = x.rows();
  if (n < 2) throw DataError("t-SNE needs at least 2 points");
  if (config.iterations < config.exaggeration_iters)
    throw DataError("iteration budget below the exaggeration phase");

  const double usable =
      std::max(1.0, (static_cast<double>(n) - 1.0) / 3.0);
  const double ppl = std::min(config.perplexity, usable);
  const Matrix p = joint_affinities(x, ppl);

  Rng rng(config.seed);
  Matrix y(n, 2);
  for (double& v : y.data()) v = 1e-4 * rng.next_gaussian();

  Matrix velocity(n, 2);
  Matrix gains(n, 2, 1.0);
  Matrix grad(n, 2);
  Matrix q_tilde(n, n);
  TsneResult result;
  const int checkpoint_iter = config.exaggeration_iters + 50;

  for (int iter = 0; iter < config.iterations; ++iter) {
    const bool exaggerating = iter < config.exaggeration_iters;
    const double exaggeration = exaggerating ? config.early_exaggeration : 1.0;
    const double momentum = iter < config.exaggeration_iters ? 0.5 : 0.8;

    const double z = fill_q_tilde(y, q_tilde);
    grad_given(p, y, q_tilde, z, exaggeration, grad);

    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < 2; ++k) {
        // Per-coordinate gains from the reference optimizer: grow while the
        // gradient keeps its direction against the velocity, shrink on a
        // flip.
        const bool opposed =
            (grad.at(i, k) > 0.0) != (velocity.at(i, k) > 0.0);
        double& gain = gains.at(i, k);
        gain = opposed ? gain + 0.2 : gain * 0.8;
        if (gain < 0.01) gain = 0.01;
        velocity.at(i, k) = momentum * velocity.at(i, k) -
                            config.learning_rate * gain * grad.at(i, k);
        y.at(i, k) += velocity.at(i, k);
      }

    double mean[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < 2; ++k) mean[k] += y.at(i, k);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < 2; ++k)
        y.at(i, k) -= mean[k] / static_cast<double>(n);

    if (iter + 1 == checkpoint_iter) result.kl_checkpoint = tsne_kl(p, y);
  }

  for (double v : y.data())
    if (!std::isfinite(v)) throw DivergenceError("t-SNE diverged");

  result.kl_final = tsne_kl(p, y);
  result.coords = std::move(y);
  return result;
}

Projection project_words(const Embedding& embedding,
                         const std::vector<std::string>& queries,
                         std::size_t k, const ProjectionConfig& config) {
  if (queries.empty()) throw DataError("no projection queries given");

  std::vector<std::string> labels, groups;
  std::unordered_map<std::string, std::size_t> seen;
  auto add = [&](const std::string& token, const std::string& group) {
    if (seen.count(token)) return;
    seen.emplace(token, labels.size());
    labels.push_back(token);
    groups.push_back(group);
  };
  for (const auto& query : queries) {
    if (embedding.id(query) < 0)
      throw DataError("projection query not in vocabulary: " + query);
    add(query, query);
    for (const auto& nb : eval::nearest_neighbors(embedding, query, k))
      add(nb.token, query);
  }

  const std::size_t n = labels.size();
  Matrix x(n, embedding.dim());
  for (std::size_t i = 0; i < n; ++i) {
    auto src = embedding.vectors.row(
        static_cast<std::size_t>(embedding.id(labels[i])));
    auto dst = x.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
  }

  const std::size_t d =
      std::min({static_cast<std::size_t>(config.pca_dims), n, embedding.dim()});
  if (d < embedding.dim()) x = pca_reduce(x, d);

  TsneResult ts = tsne(x, config);
  Projection projection;
  projection.labels = std::move(labels);
  projection.groups = std::move(groups);
  projection.coords = std::move(ts.coords);
  projection.kl_final = ts.kl_final;
  return projection;
}

}  // namespace embedkit::project
