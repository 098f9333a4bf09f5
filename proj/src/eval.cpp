#include "embedkit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "embedkit/errors.hpp"

namespace embedkit::eval {

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw DataError("cosine over vectors of different dimension");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) throw DataError("cosine of a zero vector");
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

std::vector<Neighbor> nearest_neighbors(const Embedding& embedding,
                                        const std::string& query,
                                        std::size_t k) {
  const auto qid = embedding.id(query);
  if (qid < 0) throw DataError("query not in vocabulary: " + query);
  if (k < 1) throw DataError("neighbor count must be >= 1");

  const auto q = embedding.vectors.row(static_cast<std::size_t>(qid));
  std::vector<Neighbor> scored;
  scored.reserve(embedding.size());
  for (std::size_t w = 0; w < embedding.size(); ++w) {
    if (static_cast<std::int64_t>(w) == qid) continue;
    scored.push_back({embedding.tokens[w], cosine(q, embedding.vectors.row(w))});
  }
  auto better = [](const Neighbor& a, const Neighbor& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.token < b.token;
  };
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end(), better);
  scored.resize(take);
  return scored;
}

WordPairSet load_word_pairs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read word-pair file: " + path.string());
  WordPairSet set;
  set.name = path.filename().string();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '!') {
      ++set.n_excluded;
      continue;
    }
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      throw DataError("malformed word-pair line " + std::to_string(line_no) +
                      " in " + path.string());
    WordPair pair;
    pair.a = line.substr(0, t1);
    pair.b = line.substr(t1 + 1, t2 - t1 - 1);
    try {
      pair.human_score = std::stod(line.substr(t2 + 1));
    } catch (const std::exception&) {
      throw DataError("bad score on line " + std::to_string(line_no) + " in " +
                      path.string());
    }
    if (pair.a.empty() || pair.b.empty())
      throw DataError("empty word on line " + std::to_string(line_no) + " in " +
                      path.string());
    set.pairs.push_back(std::move(pair));
  }
  return set;
}

namespace {

// Average ranks (1-based, midrank for ties).
std::vector<double> ranks_of(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::optional<double> spearman(const std::vector<double>& model_scores,
                               const std::vector<double>& human_scores) {
  if (model_scores.size() != human_scores.size())
    throw DataError("Spearman inputs differ in length");
  const std::size_t n = model_scores.size();
  if (n < 2) throw DataError("Spearman needs at least 2 observations");

  const std::vector<double> rx = ranks_of(model_scores);
  const std::vector<double> ry = ranks_of(human_scores);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;  // constant list
  return sxy / std::sqrt(sxx * syy);
}

SimilarityReport word_pair_report(const WordPairSet& pairs,
                                  const Embedding& embedding) {
  SimilarityReport report;
  report.name = pairs.name;
  double sum = 0.0;
  for (const auto& pair : pairs.pairs) {
    PairScore score;
    score.a = pair.a;
    score.b = pair.b;
    score.human_score = pair.human_score;
    const auto ia = embedding.id(pair.a);
    const auto ib = embedding.id(pair.b);
    if (ia >= 0 && ib >= 0) {
      score.model_score =
          cosine(embedding.vectors.row(static_cast<std::size_t>(ia)),
                 embedding.vectors.row(static_cast<std::size_t>(ib)));
      sum += *score.model_score;
      ++report.n_scored;
    } else {
      ++report.n_oov_pairs;
    }
    report.pairs.push_back(std::move(score));
  }
  if (report.n_scored > 0)
    report.mean_model_score = sum / static_cast<double>(report.n_scored);
  return report;
}

SimilarityReport wordsim_eval(const Embedding& embedding,
                              const WordPairSet& pairs) {
  SimilarityReport report = word_pair_report(pairs, embedding);
  std::vector<double> model, human;
  for (const auto& p : report.pairs) {
    if (!p.model_score) continue;
    model.push_back(*p.model_score);
    human.push_back(p.human_score);
  }
  if (model.size() >= 2) report.spearman_rho = spearman(model, human);
  return report;
}

}  // namespace embedkit::eval
