#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "embedkit/corpstats.hpp"
#include "embedkit/errors.hpp"
#include "embedkit/eval.hpp"
#include "embedkit/io.hpp"
#include "embedkit/project.hpp"
#include "embedkit/textpipe.hpp"
#include "embedkit/train.hpp"
#include "embedkit/unicode.hpp"
#include "embedkit/vocab.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CleanArgs {
  std::vector<std::string> inputs;
  std::string output;
  std::string stopwords;
  std::string symbols;
  bool no_html = false, no_numerics = false, no_emails_urls = false;
  bool keep_english = false, no_lowercase = false, collapse = false;
};

struct TrainArgs {
  std::string corpus, output, model = "cbow", loss, checkpoint_dir, save_cooc;
  std::string save_vocab;
  embedkit::train::TrainConfig config;
  std::uint64_t max_vocab = 0;
};

struct ProjectArgs {
  std::string vectors, out_tsv, out_json;
  std::vector<std::string> queries;
  std::size_t k = 20;
  embedkit::project::ProjectionConfig config;
};

int run_clean(const CleanArgs& args) {
  embedkit::textpipe::CleanConfig config;
  config.strip_html = !args.no_html;
  config.strip_numerics = !args.no_numerics;
  config.strip_emails_urls = !args.no_emails_urls;
  config.drop_foreign_script = !args.keep_english;
  config.lowercase = !args.no_lowercase;
  config.collapse_consecutive_duplicates = args.collapse;
  if (!args.stopwords.empty()) config.stopword_file = fs::path(args.stopwords);
  if (!args.symbols.empty()) {
    config.replacement_symbols.clear();
    for (char32_t cp : embedkit::uni::decode_utf8(args.symbols))
      config.replacement_symbols.insert(cp);
  }

  std::vector<fs::path> paths(args.inputs.begin(), args.inputs.end());
  const auto stream = embedkit::textpipe::clean(paths, config);

  std::ofstream out(args.output, std::ios::binary);
  if (!out) throw embedkit::DataError("cannot write " + args.output);
  out << embedkit::textpipe::to_text(stream);
  std::cout << "sentences\t" << stream.sentences.size() << "\n"
            << "tokens\t" << stream.total_tokens << "\n";
  return 0;
}

int run_stats(const std::string& corpus, const std::string& out_dir,
              std::size_t top_k, double min_share) {
  const auto stream = embedkit::io::read_corpus(corpus);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  const auto letters = embedkit::stats::letter_frequencies(stream);
  embedkit::io::write_freq_table(dir / "letters.tsv", letters, "letter");

  const auto words = embedkit::stats::word_frequencies(stream);
  embedkit::io::write_freq_table(dir / "words.tsv", words, "token");

  const auto lengths = embedkit::stats::word_length_distribution(stream);
  embedkit::io::write_freq_table(dir / "lengths.tsv", lengths, "length");

  embedkit::io::write_zipf_json(dir / "zipf.json",
                                embedkit::stats::zipf_fit(letters));

  const auto candidates =
      embedkit::stats::stopword_candidates(words, top_k, min_share);
  std::ofstream cand(dir / "stopword_candidates.tsv", std::ios::binary);
  cand << "token\tcount\tshare\n";
  for (const auto& c : candidates)
    cand << c.item << '\t' << c.count << '\t'
         << embedkit::io::format_double(c.share) << '\n';

  std::cout << "reports written to " << out_dir << "\n";
  return 0;
}

int run_train(TrainArgs& args) {
  auto& config = args.config;
  if (args.model == "cbow")
    config.model = embedkit::train::Model::kCbow;
  else if (args.model == "sg")
    config.model = embedkit::train::Model::kSg;
  else if (args.model == "glove")
    config.model = embedkit::train::Model::kGlove;
  else
    throw CLI::ValidationError("--model", "unknown model: " + args.model);
  if (args.loss == "hs")
    config.loss = embedkit::train::Loss::kHierarchicalSoftmax;
  else if (args.loss == "ns")
    config.loss = embedkit::train::Loss::kNegativeSampling;
  else if (!args.loss.empty())
    throw CLI::ValidationError("--loss", "unknown loss: " + args.loss);
  config.checkpoint_dir = args.checkpoint_dir;

  std::cout << "config\tmodel=" << args.model << " epochs=" << config.epochs
            << " lr=" << config.lr << " dim=" << config.dim
            << " minn=" << config.minn << " maxn=" << config.maxn
            << " ws=" << config.ws << " negatives=" << config.negatives
            << " minw=" << config.minw << " t=" << config.t
            << " seed=" << config.seed << " workers=" << config.workers
            << "\n";

  const auto stream = embedkit::io::read_corpus(args.corpus);
  std::optional<std::size_t> max_vocab;
  if (args.max_vocab > 0) max_vocab = args.max_vocab;
  const auto vocab =
      embedkit::vocab::build_vocab(stream, config.minw, max_vocab, config.t);
  std::cout << "vocabulary\t" << vocab.size() << "\n";
  if (!args.save_vocab.empty())
    embedkit::io::write_vocab_tsv(args.save_vocab, vocab.tokens, vocab.counts);

  embedkit::train::TrainResult result;
  if (config.model == embedkit::train::Model::kGlove) {
    const auto cooc =
        embedkit::train::build_cooccurrence(stream, vocab, config.ws);
    if (!args.save_cooc.empty())
      embedkit::io::write_cooc_tsv(args.save_cooc, cooc);
    result = embedkit::train::train_glove(cooc, vocab, config);
  } else {
    result = embedkit::train::train_word2vec(stream, vocab, config);
  }

  embedkit::io::write_vectors(args.output, result.embedding);
  std::ofstream log(args.output + ".log", std::ios::binary);
  log << "epoch\tmean_loss\n";
  for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
    log << (e + 1) << '\t'
        << embedkit::io::format_double(result.epoch_loss[e]) << '\n';
    std::cout << "epoch " << (e + 1) << "\tloss "
              << result.epoch_loss[e] << "\n";
  }
  return 0;
}

json report_to_json(const embedkit::eval::SimilarityReport& report) {
  json pairs = json::array();
  for (const auto& p : report.pairs) {
    json item{{"word_a", p.a}, {"word_b", p.b}, {"human_score", p.human_score}};
    if (p.model_score)
      item["model_score"] = *p.model_score;
    else
      item["model_score"] = nullptr;
    pairs.push_back(std::move(item));
  }
  json j{{"name", report.name},
         {"n_scored", report.n_scored},
         {"n_oov_pairs", report.n_oov_pairs},
         {"pairs", std::move(pairs)}};
  j["mean_model_score"] =
      report.mean_model_score ? json(*report.mean_model_score) : json(nullptr);
  j["spearman_rho"] =
      report.spearman_rho ? json(*report.spearman_rho) : json(nullptr);
  return j;
}

void maybe_write_json(const std::string& path, const json& j) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw embedkit::DataError("cannot write " + path);
  out << j.dump(2) << '\n';
}

int run_neighbors(const std::string& vectors, std::size_t k,
                  const std::vector<std::string>& words,
                  const std::string& json_path) {
  const auto embedding = embedkit::io::load_embedding(vectors);
  json all = json::array();
  for (const auto& word : words) {
    const auto neighbors = embedkit::eval::nearest_neighbors(embedding, word, k);
    json rows = json::array();
    for (const auto& nb : neighbors) {
      std::cout << word << '\t' << nb.token << '\t'
                << embedkit::io::format_double(nb.score) << "\n";
      rows.push_back({{"token", nb.token}, {"score", nb.score}});
    }
    all.push_back({{"query", word}, {"neighbors", std::move(rows)}});
  }
  maybe_write_json(json_path, all);
  return 0;
}

int run_pairs(const std::string& vectors, const std::string& pair_file,
              const std::string& json_path, bool with_rho) {
  const auto embedding = embedkit::io::load_embedding(vectors);
  const auto pairs = embedkit::eval::load_word_pairs(pair_file);
  const auto report = with_rho
                          ? embedkit::eval::wordsim_eval(embedding, pairs)
                          : embedkit::eval::word_pair_report(pairs, embedding);
  if (!with_rho) {
    for (const auto& p : report.pairs) {
      std::cout << p.a << '\t' << p.b << '\t';
      if (p.model_score)
        std::cout << embedkit::io::format_double(*p.model_score);
      else
        std::cout << "OOV";
      std::cout << "\n";
    }
    if (report.mean_model_score)
      std::cout << "mean\t"
                << embedkit::io::format_double(*report.mean_model_score) << "\n";
    std::cout << "scored\t" << report.n_scored << "\toov\t"
              << report.n_oov_pairs << "\n";
  } else {
    json summary{{"n_scored", report.n_scored},
                 {"n_oov_pairs", report.n_oov_pairs}};
    summary["rho"] =
        report.spearman_rho ? json(*report.spearman_rho) : json(nullptr);
    summary["mean_model_score"] = report.mean_model_score
                                      ? json(*report.mean_model_score)
                                      : json(nullptr);
    std::cout << summary.dump() << "\n";
  }
  maybe_write_json(json_path, report_to_json(report));
  return 0;
}

int run_project(ProjectArgs& args) {
  const auto embedding = embedkit::io::load_embedding(args.vectors);
  const auto projection = embedkit::project::project_words(
      embedding, args.queries, args.k, args.config);

  std::ofstream out(args.out_tsv, std::ios::binary);
  if (!out) throw embedkit::DataError("cannot write " + args.out_tsv);
  json points = json::array();
  for (std::size_t i = 0; i < projection.labels.size(); ++i) {
    out << projection.labels[i] << '\t' << projection.groups[i] << '\t'
        << embedkit::io::format_double(projection.coords.at(i, 0)) << '\t'
        << embedkit::io::format_double(projection.coords.at(i, 1)) << '\n';
    points.push_back({{"token", projection.labels[i]},
                      {"group", projection.groups[i]},
                      {"x", projection.coords.at(i, 0)},
                      {"y", projection.coords.at(i, 1)}});
  }
  maybe_write_json(args.out_json,
                   json{{"kl_final", projection.kl_final},
                        {"points", std::move(points)}});
  std::cout << "points\t" << projection.labels.size() << "\tkl\t"
            << embedkit::io::format_double(projection.kl_final) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corpus cleaning, statistics, embedding training and evaluation"};
  app.set_config("--config", "", "flat key=value config file; flags override");
  app.require_subcommand(1);

  CleanArgs clean_args;
  auto* clean = app.add_subcommand("clean", "run the text cleaning pipeline");
  clean->add_option("inputs", clean_args.inputs, "input text files")
      ->required()
      ->expected(-1);
  clean->add_option("--out", clean_args.output, "cleaned corpus path")
      ->required();
  clean->add_option("--stopwords", clean_args.stopwords,
                    "stoplist file; when set, stop words are removed "
                    "(GloVe input preparation)");
  clean->add_option("--replace-symbols", clean_args.symbols,
                    "replacement symbol set, one string of code points");
  clean->add_flag("--no-html", clean_args.no_html, "keep HTML tag spans");
  clean->add_flag("--no-numerics", clean_args.no_numerics, "keep digit runs");
  clean->add_flag("--no-emails-urls", clean_args.no_emails_urls,
                  "keep emails and URLs");
  clean->add_flag("--keep-english", clean_args.keep_english,
                  "keep all-Basic-Latin tokens");
  clean->add_flag("--no-lowercase", clean_args.no_lowercase,
                  "skip Latin lowercasing");
  clean->add_flag("--collapse-duplicates", clean_args.collapse,
                  "collapse immediate token repeats");

  std::string stats_corpus, stats_dir;
  std::size_t stats_top_k = 100;
  double stats_min_share = 0.0;
  auto* stats = app.add_subcommand("stats", "corpus statistics reports");
  stats->add_option("--corpus", stats_corpus, "cleaned corpus")->required();
  stats->add_option("--out-dir", stats_dir, "report directory")->required();
  stats->add_option("--top-k", stats_top_k, "stop-word candidate count")
      ->capture_default_str();
  stats->add_option("--min-share", stats_min_share,
                    "minimum frequency share for candidates")
      ->capture_default_str();

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "train embeddings");
  train->add_option("--corpus", train_args.corpus, "cleaned corpus")->required();
  train->add_option("--output", train_args.output, "vector file")->required();
  train->add_option("--model", train_args.model, "cbow | sg | glove")
      ->capture_default_str();
  train->add_option("--dim", train_args.config.dim, "embedding dimension")
      ->capture_default_str();
  train->add_option("--epochs", train_args.config.epochs, "training epochs")
      ->capture_default_str();
  train->add_option("--lr", train_args.config.lr, "initial learning rate")
      ->capture_default_str();
  train->add_option("--ws", train_args.config.ws, "context window size")
      ->capture_default_str();
  train->add_option("--negatives", train_args.config.negatives,
                    "negative samples per step (ns loss)")
      ->capture_default_str();
  train->add_option("--minn", train_args.config.minn,
                    "minimum character n-gram length")
      ->capture_default_str();
  train->add_option("--maxn", train_args.config.maxn,
                    "maximum character n-gram length (< minn disables "
                    "sub-words)")
      ->capture_default_str();
  train->add_option("--minw", train_args.config.minw,
                    "minimum word count (rare-word deletion)")
      ->capture_default_str();
  train->add_option("--t", train_args.config.t, "sub-sampling threshold")
      ->capture_default_str();
  train->add_flag("--position-weights", train_args.config.position_weights,
                  "learn position-dependent context weights (CBoW)");
  train->add_option("--x-max", train_args.config.x_max,
                    "GloVe weighting clamp")
      ->capture_default_str();
  train->add_option("--alpha", train_args.config.alpha,
                    "GloVe weighting exponent")
      ->capture_default_str();
  train->add_option("--seed", train_args.config.seed, "random seed")
      ->capture_default_str();
  train->add_option("--workers", train_args.config.workers, "worker threads")
      ->capture_default_str();
  train->add_option("--buckets", train_args.config.n_buckets,
                    "sub-word hash buckets")
      ->capture_default_str();
  train->add_option("--unigram-power", train_args.config.unigram_power,
                    "noise distribution exponent")
      ->capture_default_str();
  train->add_option("--loss", train_args.loss,
                    "hs | ns (default: hs for cbow, ns for sg)");
  train->add_option("--max-vocab", train_args.max_vocab,
                    "vocabulary cap (0 = unlimited)")
      ->capture_default_str();
  train->add_option("--checkpoint-dir", train_args.checkpoint_dir,
                    "per-epoch binary vector checkpoints");
  train->add_option("--save-cooc", train_args.save_cooc,
                    "co-occurrence TSV dump (glove)");
  train->add_option("--save-vocab", train_args.save_vocab,
                    "vocabulary TSV dump (token, count)");

  auto* eval_cmd = app.add_subcommand("eval", "intrinsic evaluation");
  eval_cmd->require_subcommand(1);
  std::string nb_vectors, nb_json;
  std::size_t nb_k = 8;
  std::vector<std::string> nb_words;
  auto* neighbors = eval_cmd->add_subcommand("neighbors",
                                             "nearest neighbors by cosine");
  neighbors->add_option("--vectors", nb_vectors, "vector file")->required();
  neighbors->add_option("--k", nb_k, "neighbor count")->capture_default_str();
  neighbors->add_option("--json", nb_json, "JSON report path");
  neighbors->add_option("words", nb_words, "query words")
      ->required()
      ->expected(-1);

  std::string pr_vectors, pr_pairs, pr_json;
  auto* pairs = eval_cmd->add_subcommand("pairs", "word-pair cosine report");
  pairs->add_option("--vectors", pr_vectors, "vector file")->required();
  pairs->add_option("--pairs", pr_pairs, "word-pair TSV")->required();
  pairs->add_option("--json", pr_json, "JSON report path");

  std::string ws_vectors, ws_pairs, ws_json;
  auto* wordsim = eval_cmd->add_subcommand(
      "wordsim", "Spearman correlation against scored pairs");
  wordsim->add_option("--vectors", ws_vectors, "vector file")->required();
  wordsim->add_option("--pairs", ws_pairs, "scored word-pair TSV")->required();
  wordsim->add_option("--json", ws_json, "JSON report path");

  ProjectArgs project_args;
  auto* project = app.add_subcommand("project", "2-D t-SNE coordinates");
  project->add_option("--vectors", project_args.vectors, "vector file")
      ->required();
  project->add_option("--out", project_args.out_tsv, "coordinate TSV")
      ->required();
  project->add_option("--json", project_args.out_json, "coordinate JSON");
  project->add_option("--k", project_args.k, "neighbors per query")
      ->capture_default_str();
  project->add_option("--perplexity", project_args.config.perplexity,
                      "t-SNE perplexity")
      ->capture_default_str();
  project->add_option("--iterations", project_args.config.iterations,
                      "t-SNE iterations")
      ->capture_default_str();
  project->add_option("--pca-dims", project_args.config.pca_dims,
                      "PCA pre-reduction dimension (>= D disables)")
      ->capture_default_str();
  project->add_option("--seed", project_args.config.seed, "random seed")
      ->capture_default_str();
  project->add_option("queries", project_args.queries, "query words")
      ->required()
      ->expected(-1);

  try {
    app.parse(argc, argv);
    if (*clean) return run_clean(clean_args);
    if (*stats) return run_stats(stats_corpus, stats_dir, stats_top_k,
                                 stats_min_share);
    if (*train) return run_train(train_args);
    if (*neighbors) return run_neighbors(nb_vectors, nb_k, nb_words, nb_json);
    if (*pairs) return run_pairs(pr_vectors, pr_pairs, pr_json, false);
    if (*wordsim) return run_pairs(ws_vectors, ws_pairs, ws_json, true);
    if (*project) return run_project(project_args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const embedkit::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const embedkit::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
