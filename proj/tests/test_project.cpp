#include <doctest.h>

#include <cmath>
#include <vector>

#include "embedkit/errors.hpp"
#include "embedkit/project.hpp"
#include "embedkit/rng.hpp"

using namespace embedkit;
using project::ProjectionConfig;

namespace {

// Two Gaussian blobs in `dims` dimensions, centers +-separation/2 on the
// first axis.
Matrix two_clusters(std::size_t per_cluster, std::size_t dims,
                    double separation, Rng& rng) {
  Matrix x(2 * per_cluster, dims);
  for (std::size_t i = 0; i < 2 * per_cluster; ++i) {
    const double center = i < per_cluster ? -separation / 2 : separation / 2;
    auto row = x.row(i);
    for (std::size_t k = 0; k < dims; ++k) row[k] = rng.next_gaussian();
    row[0] += center;
  }
  return x;
}

// Top eigenvector by power iteration with deflation: an independent route
// to the principal directions.
std::vector<double> power_iteration(const Matrix& cov, int deflate_with,
                                    const std::vector<std::vector<double>>& prior) {
  const std::size_t n = cov.rows();
  std::vector<double> v(n, 0.0);
  v[0] = 1.0;
  v[n / 2] = 0.5;
  for (int iter = 0; iter < 20000; ++iter) {
    // Deflate earlier directions.
    for (int p = 0; p < deflate_with; ++p) {
      double proj = 0.0;
      for (std::size_t i = 0; i < n; ++i) proj += v[i] * prior[p][i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= proj * prior[p][i];
    }
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) next[i] += cov.at(i, j) * v[j];
    double norm = 0.0;
    for (double x : next) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return next;  // zero-variance direction
    for (auto& x : next) x /= norm;
    v = next;
  }
  return v;
}

}  // namespace

TEST_CASE("pca_reduce") {
  SUBCASE("two points on a line") {
    Matrix x(2, 2);
    x.at(0, 0) = 0.0;
    x.at(0, 1) = 0.0;
    x.at(1, 0) = 2.0;
    x.at(1, 1) = 0.0;
    auto coords = project::pca_reduce(x, 1);
    CHECK(coords.at(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(coords.at(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("exact subspace reconstructs with zero error") {
    // Points living in a 2-D affine subspace of 6-D space.
    Rng rng(3);
    const std::size_t n = 12, dims = 6;
    Matrix basis(2, dims);
    for (double& v : basis.data()) v = rng.next_double() - 0.5;
    Matrix x(n, dims);
    std::vector<std::vector<double>> weights(n, std::vector<double>(2));
    for (std::size_t i = 0; i < n; ++i) {
      const double a = rng.next_double() * 4 - 2;
      const double b = rng.next_double() * 4 - 2;
      for (std::size_t k = 0; k < dims; ++k)
        x.at(i, k) = 0.7 + a * basis.at(0, k) + b * basis.at(1, k);
    }
    auto coords = project::pca_reduce(x, 2);
    // Distances are preserved exactly when the subspace is captured.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double d_full = 0.0, d_red = 0.0;
        for (std::size_t k = 0; k < dims; ++k) {
          const double diff = x.at(i, k) - x.at(j, k);
          d_full += diff * diff;
        }
        for (std::size_t k = 0; k < 2; ++k) {
          const double diff = coords.at(i, k) - coords.at(j, k);
          d_red += diff * diff;
        }
        CHECK(d_red == doctest::Approx(d_full).epsilon(1e-9));
      }
  }
  SUBCASE("component variances are non-increasing") {
    Rng rng(5);
    Matrix x(30, 7);
    for (double& v : x.data()) v = rng.next_double() * 3 - 1.5;
    auto coords = project::pca_reduce(x, 7);
    double prev = 1e300;
    for (std::size_t k = 0; k < 7; ++k) {
      double mean = 0.0;
      for (std::size_t i = 0; i < 30; ++i) mean += coords.at(i, k);
      mean /= 30;
      double var = 0.0;
      for (std::size_t i = 0; i < 30; ++i)
        var += (coords.at(i, k) - mean) * (coords.at(i, k) - mean);
      CHECK(var <= prev + 1e-9);
      prev = var;
    }
  }
  SUBCASE("agrees with a power-iteration oracle") {
    Rng rng(7);
    for (int trial = 0; trial < 3; ++trial) {
      const std::size_t n = 10 + rng.next_below(40);
      const std::size_t dims = 2 + rng.next_below(6);
      Matrix x(n, dims);
      for (double& v : x.data()) v = rng.next_double() * 2 - 1;

      std::vector<double> mean(dims, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < dims; ++k) mean[k] += x.at(i, k) / n;
      Matrix cov(dims, dims);
      for (std::size_t a = 0; a < dims; ++a)
        for (std::size_t b = 0; b < dims; ++b) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i)
            s += (x.at(i, a) - mean[a]) * (x.at(i, b) - mean[b]);
          cov.at(a, b) = s / (n - 1);
        }

      const std::size_t d = std::min<std::size_t>(2, dims);
      std::vector<std::vector<double>> directions;
      for (std::size_t c = 0; c < d; ++c)
        directions.push_back(
            power_iteration(cov, static_cast<int>(c), directions));

      auto coords = project::pca_reduce(x, d);
      for (std::size_t c = 0; c < d; ++c) {
        // Orient the oracle direction by the same convention.
        auto dir = directions[c];
        std::size_t arg = 0;
        for (std::size_t k = 1; k < dims; ++k)
          if (std::abs(dir[k]) > std::abs(dir[arg])) arg = k;
        if (dir[arg] < 0)
          for (auto& v : dir) v = -v;
        for (std::size_t i = 0; i < n; ++i) {
          double proj = 0.0;
          for (std::size_t k = 0; k < dims; ++k)
            proj += (x.at(i, k) - mean[k]) * dir[k];
          CHECK(coords.at(i, c) == doctest::Approx(proj).epsilon(1e-6));
        }
      }
    }
  }
  SUBCASE("preconditions") {
    Matrix one(1, 3);
    CHECK_THROWS_AS(project::pca_reduce(one, 1), DataError);
    Matrix x(4, 3);
    CHECK_THROWS_AS(project::pca_reduce(x, 4), DataError);
  }
}

TEST_CASE("perplexity_calibrate") {
  SUBCASE("equidistant neighbors give the uniform row") {
    std::vector<double> distances(9, 2.5);
    auto probs = project::perplexity_calibrate(distances, 4.0);
    for (double p : probs) CHECK(p == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  }
  SUBCASE("achieved perplexity is within 1e-3 of the target") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 5 + rng.next_below(60);
      std::vector<double> distances(n);
      for (auto& d : distances) d = 0.05 + rng.next_double() * 4.0;
      const double target = 2.0 + rng.next_double() * (n - 2.5);
      auto probs = project::perplexity_calibrate(distances, target);
      double h = 0.0;
      for (double p : probs)
        if (p > 0) h -= p * std::log2(p);
      CHECK(std::abs(std::exp2(h) - target) <= 1e-3);
    }
  }
  SUBCASE("rows always sum to one") {
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 4 + rng.next_below(30);
      std::vector<double> distances(n);
      for (auto& d : distances) d = rng.next_double() * 9.0;
      auto probs = project::perplexity_calibrate(distances, 3.0);
      double sum = 0.0;
      for (double p : probs) sum += p;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  SUBCASE("unreachable target is an error") {
    std::vector<double> distances{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(project::perplexity_calibrate(distances, 5.0), DataError);
  }
}

TEST_CASE("tsne KL gradient matches finite differences") {
  Rng rng(17);
  const std::size_t n = 12;
  Matrix x(n, 4);
  for (double& v : x.data()) v = rng.next_double() * 2 - 1;
  const Matrix p = project::joint_affinities(x, 3.0);

  Matrix y(n, 2);
  for (double& v : y.data()) v = rng.next_double() - 0.5;

  const Matrix grad = project::tsne_kl_grad(p, y);
  const double h = 1e-6;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < 2; ++k) {
      y.at(i, k) += h;
      const double up = project::tsne_kl(p, y);
      y.at(i, k) -= 2 * h;
      const double down = project::tsne_kl(p, y);
      y.at(i, k) += h;
      const double fd = (up - down) / (2 * h);
      CHECK(std::abs(grad.at(i, k) - fd) /
                std::max({std::abs(fd), std::abs(grad.at(i, k)), 1e-6}) <
            1e-4);
    }
}

TEST_CASE("tsne separates two clusters") {
  Rng data_rng(19);
  Matrix x = two_clusters(20, 10, 14.0, data_rng);
  ProjectionConfig config;
  config.perplexity = 10.0;
  config.iterations = 2000;
  config.seed = 23;
  auto result = project::tsne(x, config);
  CHECK(result.kl_final >= 0.0);
  CHECK(result.kl_final <= result.kl_checkpoint + 1e-6);

  // Linear separability along the centroid axis.
  const std::size_t n = x.rows();
  double c0[2] = {0, 0}, c1[2] = {0, 0};
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < 2; ++k)
      (i < n / 2 ? c0[k] : c1[k]) += result.coords.at(i, k) / (n / 2.0);
  int misclassified = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double d0 = 0, d1 = 0;
    for (int k = 0; k < 2; ++k) {
      d0 += (result.coords.at(i, k) - c0[k]) * (result.coords.at(i, k) - c0[k]);
      d1 += (result.coords.at(i, k) - c1[k]) * (result.coords.at(i, k) - c1[k]);
    }
    const bool in_first = d0 < d1;
    if (in_first != (i < n / 2)) ++misclassified;
  }
  CHECK(misclassified == 0);
}

TEST_CASE("tsne is deterministic for a fixed seed") {
  Rng data_rng(29);
  Matrix x = two_clusters(8, 5, 8.0, data_rng);
  ProjectionConfig config;
  config.perplexity = 4.0;
  config.iterations = 300;
  config.seed = 31;
  auto a = project::tsne(x, config);
  auto b = project::tsne(x, config);
  for (std::size_t i = 0; i < a.coords.data().size(); ++i)
    CHECK(a.coords.data()[i] == b.coords.data()[i]);
  CHECK(a.kl_final == b.kl_final);
}

TEST_CASE("project_words") {
  // Embedding with two obvious groups around orthogonal anchors.
  Embedding e;
  const std::size_t dims = 6;
  std::vector<std::pair<std::string, int>> words;
  Rng rng(37);
  e.vectors = Matrix(12, dims);
  for (std::size_t i = 0; i < 12; ++i) {
    const bool first = i < 6;
    e.tokens.push_back((first ? "a" : "b") + std::to_string(i % 6));
    auto row = e.vectors.row(i);
    for (std::size_t k = 0; k < dims; ++k)
      row[k] = 0.05 * (rng.next_double() - 0.5);
    row[first ? 0 : 1] += 1.0;
  }
  e.build_index();

  SUBCASE("point budget and group partition") {
    ProjectionConfig config;
    config.iterations = 300;
    config.perplexity = 3.0;
    auto p = project::project_words(e, {"a0", "b0"}, 4, config);
    CHECK(p.labels.size() <= 10);  // 2 queries + 2 * 4 neighbors
    CHECK(p.labels.size() == p.groups.size());
    for (const auto& g : p.groups) CHECK((g == "a0" || g == "b0"));
    CHECK(p.kl_final >= 0.0);
  }
  SUBCASE("one query and one neighbor make two points") {
    ProjectionConfig config;
    config.iterations = 300;
    auto p = project::project_words(e, {"a0"}, 1, config);
    CHECK(p.labels.size() == 2);
  }
  SUBCASE("oov query is an error") {
    ProjectionConfig config;
    CHECK_THROWS_AS(project::project_words(e, {"zzz"}, 3, config), DataError);
  }
  SUBCASE("fixed seed gives identical coordinates") {
    ProjectionConfig config;
    config.iterations = 300;
    config.seed = 41;
    auto p = project::project_words(e, {"a0", "b1"}, 5, config);
    auto q = project::project_words(e, {"a0", "b1"}, 5, config);
    for (std::size_t i = 0; i < p.coords.data().size(); ++i)
      CHECK(p.coords.data()[i] == q.coords.data()[i]);
  }
}
