#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "embedkit/embedding.hpp"
#include "embedkit/matrix.hpp"

namespace embedkit::project {

struct ProjectionConfig {
  double perplexity = 20.0;
  int iterations = 5000;
  int pca_dims = 50;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  int exaggeration_iters = 250;
  std::uint64_t seed = 1;
};

struct Projection {
  std::vector<std::string> labels;
  std::vector<std::string> groups;  // source query of each point
  Matrix coords;                    // n x 2
  double kl_final = 0.0;
};

// Mean-centered projection onto the top-d principal directions. Each
// direction is oriented so its largest-magnitude component is positive.
// Requires n >= 2 and d <= min(n, D); rank deficiency is fine (trailing
// directions carry zero variance).
Matrix pca_reduce(const Matrix& x, std::size_t d);

// Gaussian bandwidth found by bisection so the row's perplexity 2^H hits
// target_ppl within 1e-3. Input: squared distances to the other points.
// A perfectly equidistant row is uniform at any bandwidth and is returned
// as such. Throws DataError after 200 non-converging steps.
std::vector<double> perplexity_calibrate(std::span<const double> sq_distances,
                                         double target_ppl);

// Symmetrized joint affinities from per-row calibrated conditionals.
Matrix joint_affinities(const Matrix& x, double target_ppl);

// KL(P || Q(Y)) under the Student-t low-dimensional kernel, never below 0,
// and its exact gradient with respect to Y. Exposed for numeric checks.
double tsne_kl(const Matrix& p, const Matrix& y);
Matrix tsne_kl_grad(const Matrix& p, const Matrix& y);

struct TsneResult {
  Matrix coords;              // n x 2
  double kl_final = 0.0;      // plain (non-exaggerated) KL at the end
  double kl_checkpoint = 0.0; // plain KL shortly after exaggeration ends
};

// Exact O(n^2) t-SNE: momentum 0.5 switching to 0.8 and exaggeration
// removed after exaggeration_iters. Perplexity is clamped to the usable
// range for small point sets. Fixed seed, fixed input: identical output.
TsneResult tsne(const Matrix& x, const ProjectionConfig& config);

// Gathers each query's top-k neighbors, unions them with the queries,
// then runs pca_reduce and tsne. Group label = the query that first
// pulled the point in. Throws DataError on OOV queries.
Projection project_words(const Embedding& embedding,
                         const std::vector<std::string>& queries,
                         std::size_t k, const ProjectionConfig& config);

}  // namespace embedkit::project
