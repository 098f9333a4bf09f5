#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "embedkit/errors.hpp"
#include "embedkit/eval.hpp"
#include "embedkit/io.hpp"
#include "embedkit/rng.hpp"
#include "temp_dir.hpp"

using namespace embedkit;

namespace {

Embedding embedding_of(std::vector<std::pair<std::string, std::vector<double>>>
                           rows) {
  Embedding e;
  e.vectors = Matrix(rows.size(), rows[0].second.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    e.tokens.push_back(rows[i].first);
    auto dst = e.vectors.row(i);
    std::copy(rows[i].second.begin(), rows[i].second.end(), dst.begin());
  }
  e.build_index();
  return e;
}

// Midranks by pairwise counting, then the plain Pearson formula: a
// deliberately different route from the implementation.
double spearman_oracle(const std::vector<double>& x,
                       const std::vector<double>& y) {
  const std::size_t n = x.size();
  auto midranks = [n](const std::vector<double>& v) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t below = 0, equal = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (v[j] < v[i]) ++below;
        if (v[j] == v[i]) ++equal;
      }
      r[i] = static_cast<double>(below) +
             (static_cast<double>(equal) + 1.0) / 2.0;
    }
    return r;
  };
  const auto rx = midranks(x);
  const auto ry = midranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST_CASE("cosine") {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  const std::vector<double> ex{1, 0}, ey{0, 1}, zero{0, 0};
  CHECK(eval::cosine(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eval::cosine(ex, ey) == doctest::Approx(0.0));
  CHECK(eval::cosine(a, b) ==
        doctest::Approx(32.0 / (std::sqrt(14.0) * std::sqrt(77.0)))
            .epsilon(1e-9));
  CHECK(eval::cosine(a, b) == doctest::Approx(0.974632).epsilon(1e-6));

  CHECK_THROWS_AS(eval::cosine(ex, a), DataError);
  CHECK_THROWS_AS(eval::cosine(zero, ey), DataError);

  SUBCASE("symmetry, scale invariance and bounds") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t d = 1 + rng.next_below(8);
      std::vector<double> x(d), y(d);
      for (auto& v : x) v = rng.next_double() * 2 - 1;
      for (auto& v : y) v = rng.next_double() * 2 - 1;
      bool zero = true;
      for (double v : x) zero &= v == 0.0;
      if (zero) x[0] = 0.5;
      zero = true;
      for (double v : y) zero &= v == 0.0;
      if (zero) y[0] = 0.5;
      const double c = eval::cosine(x, y);
      CHECK(c >= -1.0 - 1e-9);
      CHECK(c <= 1.0 + 1e-9);
      CHECK(c == doctest::Approx(eval::cosine(y, x)).epsilon(1e-12));
      std::vector<double> sx = x;
      const double lambda = 0.25 + rng.next_double() * 5;
      for (auto& v : sx) v *= lambda;
      CHECK(eval::cosine(sx, y) == doctest::Approx(c).epsilon(1e-9));
    }
  }
}

TEST_CASE("nearest_neighbors") {
  auto e = embedding_of({{"a", {1, 0}}, {"b", {0.9, 0.1}}, {"c", {0, 1}}});
  SUBCASE("highest cosine wins") {
    auto nn = eval::nearest_neighbors(e, "a", 1);
    REQUIRE(nn.size() == 1);
    CHECK(nn[0].token == "b");
  }
  SUBCASE("k past the vocabulary returns the full ranking") {
    auto nn = eval::nearest_neighbors(e, "a", 10);
    REQUIRE(nn.size() == 2);
    CHECK(nn[0].token == "b");
    CHECK(nn[1].token == "c");
  }
  SUBCASE("the query never returns itself") {
    for (const auto& q : {"a", "b", "c"})
      for (const auto& nb : eval::nearest_neighbors(e, q, 2))
        CHECK(nb.token != q);
  }
  SUBCASE("oov query is an error") {
    CHECK_THROWS_AS(eval::nearest_neighbors(e, "zzz", 1), DataError);
  }
  SUBCASE("matches a full-scan oracle on random embeddings") {
    Rng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
      const std::size_t v = 50 + rng.next_below(950);
      Embedding big;
      big.vectors = Matrix(v, 8);
      for (std::size_t w = 0; w < v; ++w) {
        big.tokens.push_back("w" + std::to_string(w));
        for (auto& x : big.vectors.row(w)) x = rng.next_double() * 2 - 1;
      }
      big.build_index();
      const std::string query = "w0";
      const std::size_t k = 1 + rng.next_below(12);
      auto got = eval::nearest_neighbors(big, query, k);

      std::vector<eval::Neighbor> oracle;
      for (std::size_t w = 1; w < v; ++w)
        oracle.push_back({big.tokens[w],
                          eval::cosine(big.vectors.row(0), big.vectors.row(w))});
      std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.token < b.token;
      });
      oracle.resize(std::min(k, oracle.size()));
      REQUIRE(got.size() == oracle.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].token == oracle[i].token);
        CHECK(got[i].score == doctest::Approx(oracle[i].score).epsilon(1e-12));
      }
      CHECK(got.size() == std::min(k, v - 1));
    }
  }
}

TEST_CASE("spearman") {
  SUBCASE("perfect monotone") {
    CHECK(*eval::spearman({1, 2, 3, 4}, {10, 20, 30, 40}) ==
          doctest::Approx(1.0));
    CHECK(*eval::spearman({1, 2, 3, 4}, {8, 6, 4, 2}) == doctest::Approx(-1.0));
  }
  SUBCASE("hand-computed rank difference case") {
    // d^2 sums to 4: rho = 1 - 24/120 = 0.8
    CHECK(*eval::spearman({1, 2, 3, 4, 5}, {2, 1, 4, 3, 5}) ==
          doctest::Approx(0.8).epsilon(1e-12));
  }
  SUBCASE("errors and undefined cases") {
    CHECK_THROWS_AS(eval::spearman({1.0}, {2.0}), DataError);
    CHECK_THROWS_AS(eval::spearman({1, 2}, {1, 2, 3}), DataError);
    CHECK_FALSE(eval::spearman({3, 3, 3}, {1, 2, 3}).has_value());
  }
  SUBCASE("invariant under strictly increasing transforms") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 3 + rng.next_below(20);
      std::vector<double> x(n), y(n);
      for (auto& v : x) v = rng.next_double();
      for (auto& v : y) v = rng.next_double();
      const double base = *eval::spearman(x, y);
      std::vector<double> tx = x;
      for (auto& v : tx) v = std::exp(3.0 * v) + 1.0;  // strictly increasing
      CHECK(*eval::spearman(tx, y) == doctest::Approx(base).epsilon(1e-12));
      std::vector<double> ty = y;
      for (auto& v : ty) v = std::atan(5.0 * v - 2.0);
      CHECK(*eval::spearman(x, ty) == doctest::Approx(base).epsilon(1e-12));
    }
  }
  SUBCASE("self and reversed ranks") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 2 + rng.next_below(12);
      std::vector<double> x(n);
      for (auto& v : x) v = rng.next_double();  // ties improbable
      CHECK(*eval::spearman(x, x) == doctest::Approx(1.0).epsilon(1e-12));
      std::vector<double> neg = x;
      for (auto& v : neg) v = -v;
      CHECK(*eval::spearman(x, neg) == doctest::Approx(-1.0).epsilon(1e-12));
    }
  }
  SUBCASE("ties agree with the average-rank oracle") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + rng.next_below(11);  // n <= 12
      std::vector<double> x(n), y(n);
      for (auto& v : x) v = static_cast<double>(rng.next_below(4));
      for (auto& v : y) v = static_cast<double>(rng.next_below(4));
      const auto mine = eval::spearman(x, y);
      if (!mine) continue;  // constant list
      CHECK(*mine == doctest::Approx(spearman_oracle(x, y)).epsilon(1e-12));
    }
  }
}

TEST_CASE("word pair files") {
  TempDir dir;
  SUBCASE("comments, exclusions and scores") {
    auto p = dir.write("pairs.tsv",
                       "# header comment\n"
                       "cat\tdog\t7.5\n"
                       "!sun\tmoon\t5.0\n"
                       "king\tqueen\t8.25\n");
    auto set = eval::load_word_pairs(p);
    CHECK(set.pairs.size() == 2);
    CHECK(set.n_excluded == 1);
    CHECK(set.pairs[0].a == "cat");
    CHECK(set.pairs[0].human_score == doctest::Approx(7.5));
  }
  SUBCASE("the 353-minus-6 protocol count") {
    std::string content;
    for (int i = 0; i < 353; ++i) {
      if (i < 6) content += "!";
      content += "a" + std::to_string(i) + "\tb" + std::to_string(i) + "\t" +
                 std::to_string(i % 10) + "\n";
    }
    auto set = eval::load_word_pairs(dir.write("ws353.tsv", content));
    CHECK(set.pairs.size() == 347);
    CHECK(set.n_excluded == 6);
  }
  SUBCASE("malformed line reported with its number") {
    auto p = dir.write("bad.tsv", "cat\tdog\t7.5\nbroken line\n");
    try {
      eval::load_word_pairs(p);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
}

TEST_CASE("word_pair_report") {
  auto e = embedding_of(
      {{"a", {1, 0}}, {"b", {0.6, 0.8}}, {"c", {0, 1}}});
  SUBCASE("oov pairs are surfaced, not imputed") {
    eval::WordPairSet set;
    set.pairs = {{"a", "b", 5.0}, {"a", "missing", 3.0}, {"b", "c", 1.0}};
    auto report = eval::word_pair_report(set, e);
    CHECK(report.n_scored == 2);
    CHECK(report.n_oov_pairs == 1);
    CHECK(report.pairs.size() == 3);
    CHECK_FALSE(report.pairs[1].model_score.has_value());
    const double mean = (*report.pairs[0].model_score +
                         *report.pairs[2].model_score) / 2.0;
    CHECK(*report.mean_model_score == doctest::Approx(mean).epsilon(1e-12));
  }
  SUBCASE("all pairs oov leaves the mean absent") {
    eval::WordPairSet set;
    set.pairs = {{"x", "y", 5.0}, {"p", "q", 3.0}};
    auto report = eval::word_pair_report(set, e);
    CHECK(report.n_scored == 0);
    CHECK(report.n_oov_pairs == 2);
    CHECK_FALSE(report.mean_model_score.has_value());
  }
  SUBCASE("identity pair scores one") {
    eval::WordPairSet set;
    set.pairs = {{"a", "a", 9.0}};
    auto report = eval::word_pair_report(set, e);
    CHECK(*report.pairs[0].model_score == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("wordsim_eval") {
  SUBCASE("monotone model scores give rho 1") {
    // Vectors on the unit circle: pair cosines strictly increase with the
    // human scores.
    auto e = embedding_of({{"q", {1, 0}},
                           {"w1", {std::cos(1.2), std::sin(1.2)}},
                           {"w2", {std::cos(0.8), std::sin(0.8)}},
                           {"w3", {std::cos(0.4), std::sin(0.4)}},
                           {"w4", {std::cos(0.1), std::sin(0.1)}}});
    eval::WordPairSet set;
    set.pairs = {{"q", "w1", 1.0}, {"q", "w2", 2.0}, {"q", "w3", 3.0},
                 {"q", "w4", 4.0}};
    auto report = eval::wordsim_eval(e, set);
    CHECK(report.n_scored == 4);
    CHECK(*report.spearman_rho == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("shuffled human scores average to rho 0") {
    Rng rng(23);
    const std::size_t n = 347;
    std::vector<double> model(n), human(n);
    for (std::size_t i = 0; i < n; ++i) {
      model[i] = rng.next_double();
      human[i] = static_cast<double>(i);
    }
    double sum = 0.0;
    for (int perm = 0; perm < 1000; ++perm) {
      for (std::size_t i = n - 1; i > 0; --i)
        std::swap(human[i], human[rng.next_below(i + 1)]);
      sum += *eval::spearman(model, human);
    }
    CHECK(std::abs(sum / 1000.0) < 0.05);
  }
  SUBCASE("oov pairs are skipped and counted") {
    auto e = embedding_of({{"a", {1, 0}}, {"b", {0.6, 0.8}}, {"c", {0, 1}}});
    eval::WordPairSet set;
    set.pairs = {{"a", "b", 1.0}, {"b", "c", 2.0}, {"a", "c", 3.0},
                 {"a", "zzz", 4.0}};
    auto report = eval::wordsim_eval(e, set);
    CHECK(report.n_scored == 3);
    CHECK(report.n_oov_pairs == 1);
    CHECK(report.spearman_rho.has_value());
  }
}

TEST_CASE("vector file round trip") {
  TempDir dir;
  auto e = embedding_of({{"alpha", {0.125, -3.5, 1e-17}},
                         {"beta", {2.0, 0.333333333333333314, 9.0}}});
  const auto path = dir.path / "vec.txt";
  io::write_vectors(path, e);
  auto back = io::read_vectors(path);
  REQUIRE(back.size() == 2);
  CHECK(back.tokens == e.tokens);
  CHECK(back.dim() == 3);
  for (std::size_t w = 0; w < 2; ++w)
    for (std::size_t k = 0; k < 3; ++k)
      CHECK(back.vectors.at(w, k) == e.vectors.at(w, k));  // full precision
  CHECK_THROWS_AS(io::read_vectors(dir.path / "nope.txt"), DataError);
}

TEST_CASE("binary checkpoint round trip and format sniffing") {
  TempDir dir;
  auto e = embedding_of({{"alpha", {0.125, -3.5, 1e-17}},
                         {"\xd8\xb3\xd9\x86\xd8\xaf", {2.0, -1.0, 0.0}}});
  const auto bin = dir.path / "vec.ekvb";
  io::write_vectors_binary(bin, e);
  auto back = io::read_vectors_binary(bin);
  CHECK(back.tokens == e.tokens);
  CHECK(back.vectors.data() == e.vectors.data());  // bit-exact

  // The sniffing loader picks the right reader for both formats.
  const auto txt = dir.path / "vec.txt";
  io::write_vectors(txt, e);
  CHECK(io::load_embedding(bin).tokens == e.tokens);
  CHECK(io::load_embedding(txt).tokens == e.tokens);

  // A text file is rejected by the binary reader.
  CHECK_THROWS_AS(io::read_vectors_binary(txt), DataError);
}
