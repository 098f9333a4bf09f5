#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "embedkit/corpstats.hpp"
#include "embedkit/errors.hpp"
#include "embedkit/eval.hpp"
#include "embedkit/io.hpp"
#include "embedkit/project.hpp"
#include "embedkit/textpipe.hpp"
#include "embedkit/train.hpp"
#include "embedkit/vocab.hpp"

namespace py = pybind11;
using namespace embedkit;

namespace {

textpipe::TokenStream to_stream(
    const std::vector<std::vector<std::string>>& sentences) {
  textpipe::TokenStream stream;
  stream.sentences = sentences;
  stream.recount();
  return stream;
}

textpipe::CleanConfig make_clean_config(bool strip_html, bool strip_numerics,
                                        bool strip_emails_urls,
                                        bool drop_foreign_script,
                                        bool collapse_duplicates,
                                        bool lowercase,
                                        const std::string& stopword_file) {
  textpipe::CleanConfig config;
  config.strip_html = strip_html;
  config.strip_numerics = strip_numerics;
  config.strip_emails_urls = strip_emails_urls;
  config.drop_foreign_script = drop_foreign_script;
  config.collapse_consecutive_duplicates = collapse_duplicates;
  config.lowercase = lowercase;
  if (!stopword_file.empty()) config.stopword_file = stopword_file;
  return config;
}

train::TrainConfig make_train_config(const std::string& model, int dim,
                                     int epochs, double lr, int ws,
                                     int negatives, int minn, int maxn,
                                     std::uint64_t minw, double t,
                                     bool position_weights, double x_max,
                                     double alpha, std::uint64_t seed,
                                     int workers, std::uint32_t buckets,
                                     const std::string& loss) {
  train::TrainConfig config;
  if (model == "cbow")
    config.model = train::Model::kCbow;
  else if (model == "sg")
    config.model = train::Model::kSg;
  else if (model == "glove")
    config.model = train::Model::kGlove;
  else
    throw DataError("unknown model: " + model);
  config.dim = dim;
  config.epochs = epochs;
  config.lr = lr;
  config.ws = ws;
  config.negatives = negatives;
  config.minn = minn;
  config.maxn = maxn;
  config.minw = minw;
  config.t = t;
  config.position_weights = position_weights;
  config.x_max = x_max;
  config.alpha = alpha;
  config.seed = seed;
  config.workers = workers;
  config.n_buckets = buckets;
  if (loss == "hs")
    config.loss = train::Loss::kHierarchicalSoftmax;
  else if (loss == "ns")
    config.loss = train::Loss::kNegativeSampling;
  else if (!loss.empty())
    throw DataError("unknown loss: " + loss);
  return config;
}

}  // namespace

PYBIND11_MODULE(_embedkit, m) {
  m.doc() = "corpus cleaning, statistics, word-embedding training and "
            "intrinsic evaluation";

  py::register_exception<DataError>(m, "DataError");
  py::register_exception<DivergenceError>(m, "DivergenceError");

  py::class_<Embedding>(m, "Embedding")
      .def_property_readonly("tokens",
                             [](const Embedding& e) { return e.tokens; })
      .def_property_readonly("dim", &Embedding::dim)
      .def("__len__", &Embedding::size)
      .def("__contains__",
           [](const Embedding& e, const std::string& w) { return e.id(w) >= 0; })
      .def("vector", [](const Embedding& e, const std::string& word) {
        const auto id = e.id(word);
        if (id < 0) throw DataError("not in vocabulary: " + word);
        auto row = e.vectors.row(static_cast<std::size_t>(id));
        return std::vector<double>(row.begin(), row.end());
      });

  m.def(
      "clean_text",
      [](const std::string& raw, bool strip_html, bool strip_numerics,
         bool strip_emails_urls, bool drop_foreign_script,
         bool collapse_duplicates, bool lowercase,
         const std::string& stopword_file) {
        return textpipe::clean_text(
                   raw, make_clean_config(strip_html, strip_numerics,
                                          strip_emails_urls,
                                          drop_foreign_script,
                                          collapse_duplicates, lowercase,
                                          stopword_file))
            .sentences;
      },
      py::arg("raw"), py::arg("strip_html") = true,
      py::arg("strip_numerics") = true, py::arg("strip_emails_urls") = true,
      py::arg("drop_foreign_script") = true,
      py::arg("collapse_duplicates") = false, py::arg("lowercase") = true,
      py::arg("stopword_file") = "",
      "Run the full cleaning pipeline on a text; returns sentences of tokens.");

  m.def(
      "clean_files",
      [](const std::vector<std::string>& paths, const std::string& out,
         bool strip_html, bool strip_numerics, bool strip_emails_urls,
         bool drop_foreign_script, bool collapse_duplicates, bool lowercase,
         const std::string& stopword_file) {
        std::vector<std::filesystem::path> fs_paths(paths.begin(), paths.end());
        const auto stream = textpipe::clean(
            fs_paths, make_clean_config(strip_html, strip_numerics,
                                        strip_emails_urls, drop_foreign_script,
                                        collapse_duplicates, lowercase,
                                        stopword_file));
        std::ofstream f(out, std::ios::binary);
        if (!f) throw DataError("cannot write " + out);
        f << textpipe::to_text(stream);
        return py::make_tuple(stream.sentences.size(), stream.total_tokens);
      },
      py::arg("paths"), py::arg("out"), py::arg("strip_html") = true,
      py::arg("strip_numerics") = true, py::arg("strip_emails_urls") = true,
      py::arg("drop_foreign_script") = true,
      py::arg("collapse_duplicates") = false, py::arg("lowercase") = true,
      py::arg("stopword_file") = "",
      "Clean input files into a corpus file; returns (sentences, tokens).");

  m.def("char_ngrams", &vocab::char_ngrams, py::arg("word"), py::arg("minn"),
        py::arg("maxn"));

  m.def(
      "word_frequencies",
      [](const std::vector<std::vector<std::string>>& sentences) {
        const auto table = stats::word_frequencies(to_stream(sentences));
        std::vector<py::tuple> rows;
        rows.reserve(table.entries.size());
        for (const auto& e : table.entries)
          rows.push_back(py::make_tuple(e.item, e.count, e.share));
        return rows;
      },
      py::arg("sentences"));

  m.def(
      "letter_frequencies",
      [](const std::vector<std::vector<std::string>>& sentences) {
        const auto table = stats::letter_frequencies(to_stream(sentences));
        std::vector<py::tuple> rows;
        rows.reserve(table.entries.size());
        for (const auto& e : table.entries)
          rows.push_back(py::make_tuple(e.item, e.count, e.share));
        return rows;
      },
      py::arg("sentences"));

  m.def(
      "stopword_candidates",
      [](const std::vector<std::vector<std::string>>& sentences,
         std::size_t top_k, double min_share) {
        const auto table = stats::word_frequencies(to_stream(sentences));
        std::vector<py::tuple> rows;
        for (const auto& e :
             stats::stopword_candidates(table, top_k, min_share))
          rows.push_back(py::make_tuple(e.item, e.count, e.share));
        return rows;
      },
      py::arg("sentences"), py::arg("top_k") = 100, py::arg("min_share") = 0.0,
      "Highest-frequency tokens for human stop-word review.");

  m.def(
      "zipf_fit",
      [](const std::vector<std::vector<std::string>>& sentences) {
        const auto fit =
            stats::zipf_fit(stats::word_frequencies(to_stream(sentences)));
        py::dict d;
        d["a"] = fit.a;
        d["b"] = fit.b;
        d["r_squared"] = fit.r_squared;
        d["n_ranks"] = fit.n_ranks;
        return d;
      },
      py::arg("sentences"));

  m.def(
      "train",
      [](const std::vector<std::vector<std::string>>& sentences,
         const std::string& model, int dim, int epochs, double lr, int ws,
         int negatives, int minn, int maxn, std::uint64_t minw, double t,
         bool position_weights, double x_max, double alpha, std::uint64_t seed,
         int workers, std::uint32_t buckets, const std::string& loss) {
        const auto stream = to_stream(sentences);
        const auto config = make_train_config(
            model, dim, epochs, lr, ws, negatives, minn, maxn, minw, t,
            position_weights, x_max, alpha, seed, workers, buckets, loss);
        const auto vocabulary =
            vocab::build_vocab(stream, config.minw, std::nullopt, config.t);
        train::TrainResult result;
        if (config.model == train::Model::kGlove) {
          const auto cooc =
              train::build_cooccurrence(stream, vocabulary, config.ws);
          result = train::train_glove(cooc, vocabulary, config);
        } else {
          result = train::train_word2vec(stream, vocabulary, config);
        }
        return py::make_tuple(result.embedding, result.epoch_loss);
      },
      py::arg("sentences"), py::arg("model") = "cbow", py::arg("dim") = 300,
      py::arg("epochs") = 40, py::arg("lr") = 0.25, py::arg("ws") = 7,
      py::arg("negatives") = 20, py::arg("minn") = 2, py::arg("maxn") = 7,
      py::arg("minw") = 4, py::arg("t") = 1e-4,
      py::arg("position_weights") = false, py::arg("x_max") = 100.0,
      py::arg("alpha") = 0.75, py::arg("seed") = 1, py::arg("workers") = 1,
      py::arg("buckets") = 2'000'000, py::arg("loss") = "",
      "Train embeddings over tokenized sentences; returns "
      "(embedding, per-epoch losses).");

  m.def("load_vectors",
        [](const std::string& path) { return io::load_embedding(path); },
        py::arg("path"));
  m.def(
      "save_vectors",
      [](const std::string& path, const Embedding& e) {
        io::write_vectors(path, e);
      },
      py::arg("path"), py::arg("embedding"));

  m.def(
      "cosine",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return eval::cosine(a, b);
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "neighbors",
      [](const Embedding& e, const std::string& query, std::size_t k) {
        std::vector<py::tuple> rows;
        for (const auto& nb : eval::nearest_neighbors(e, query, k))
          rows.push_back(py::make_tuple(nb.token, nb.score));
        return rows;
      },
      py::arg("embedding"), py::arg("query"), py::arg("k") = 8);

  m.def(
      "spearman",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        return eval::spearman(x, y);
      },
      py::arg("model_scores"), py::arg("human_scores"));

  m.def(
      "wordsim",
      [](const Embedding& e, const std::string& pairs_path) {
        const auto report =
            eval::wordsim_eval(e, eval::load_word_pairs(pairs_path));
        py::dict d;
        d["n_scored"] = report.n_scored;
        d["n_oov_pairs"] = report.n_oov_pairs;
        d["rho"] = report.spearman_rho ? py::cast(*report.spearman_rho)
                                       : py::none();
        d["mean_model_score"] = report.mean_model_score
                                    ? py::cast(*report.mean_model_score)
                                    : py::none();
        return d;
      },
      py::arg("embedding"), py::arg("pairs_path"));

  m.def(
      "project_words",
      [](const Embedding& e, const std::vector<std::string>& queries,
         std::size_t k, double perplexity, int iterations, int pca_dims,
         std::uint64_t seed) {
        project::ProjectionConfig config;
        config.perplexity = perplexity;
        config.iterations = iterations;
        config.pca_dims = pca_dims;
        config.seed = seed;
        const auto p = project::project_words(e, queries, k, config);
        std::vector<py::tuple> rows;
        for (std::size_t i = 0; i < p.labels.size(); ++i)
          rows.push_back(py::make_tuple(p.labels[i], p.groups[i],
                                        p.coords.at(i, 0), p.coords.at(i, 1)));
        return py::make_tuple(rows, p.kl_final);
      },
      py::arg("embedding"), py::arg("queries"), py::arg("k") = 20,
      py::arg("perplexity") = 20.0, py::arg("iterations") = 5000,
      py::arg("pca_dims") = 50, py::arg("seed") = 1,
      "t-SNE coordinates for queries and their neighbors; returns "
      "((token, group, x, y) rows, final KL).");
}
