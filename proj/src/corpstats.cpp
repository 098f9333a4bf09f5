#include "embedkit/corpstats.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "embedkit/errors.hpp"
#include "embedkit/unicode.hpp"

namespace embedkit::stats {
namespace {

FreqTable to_table(std::unordered_map<std::string, std::uint64_t> counts) {
  FreqTable table;
  table.entries.reserve(counts.size());
  for (auto& [item, count] : counts) {
    table.total += count;
    table.entries.push_back({item, count, 0.0});
  }
  std::sort(table.entries.begin(), table.entries.end(),
            [](const FreqEntry& a, const FreqEntry& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.item < b.item;
            });
  if (table.total > 0)
    for (auto& e : table.entries)
      e.share = static_cast<double>(e.count) / static_cast<double>(table.total);
  return table;
}

}  // namespace

FreqTable letter_frequencies(const textpipe::TokenStream& stream) {
  if (stream.total_tokens == 0)
    throw DataError("letter frequencies over an empty corpus");
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& sentence : stream.sentences)
    for (const auto& token : sentence)
      for (char32_t cp : uni::decode_utf8(token)) {
        std::string letter;
        uni::append_utf8(letter, cp);
        ++counts[letter];
      }
  return to_table(std::move(counts));
}

ZipfFit zipf_fit(const FreqTable& table) {
  std::vector<double> log_rank, log_freq;
  for (std::size_t r = 0; r < table.entries.size(); ++r) {
    if (table.entries[r].count == 0) continue;
    log_rank.push_back(std::log(static_cast<double>(r + 1)));
    log_freq.push_back(std::log(static_cast<double>(table.entries[r].count)));
  }
  const std::size_t n = log_rank.size();
  if (n < 2) throw DataError("Zipf fit needs at least 2 positive-count ranks");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += log_rank[i];
    my += log_freq[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = log_rank[i] - mx;
    const double dy = log_freq[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;

  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double resid = log_freq[i] - (intercept + slope * log_rank[i]);
    ss_res += resid * resid;
  }
  ZipfFit fit;
  fit.b = -slope;
  fit.a = std::exp(intercept);
  fit.n_ranks = static_cast<int>(n);
  // Constant frequencies make SS_tot vanish; the flat line is then exact.
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

FreqTable word_length_distribution(const textpipe::TokenStream& stream) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& sentence : stream.sentences)
    for (const auto& token : sentence)
      ++counts[std::to_string(uni::count_codepoints(token))];
  return to_table(std::move(counts));
}

FreqTable word_frequencies(const textpipe::TokenStream& stream) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& sentence : stream.sentences)
    for (const auto& token : sentence) ++counts[token];
  return to_table(std::move(counts));
}

std::vector<FreqEntry> stopword_candidates(const FreqTable& table,
                                           std::size_t top_k,
                                           double min_share) {
  std::vector<FreqEntry> candidates;
  for (const auto& entry : table.entries) {
    if (candidates.size() >= top_k) break;
    if (entry.share >= min_share) candidates.push_back(entry);
  }
  return candidates;
}

train::CoocMatrix sppmi_matrix(const train::CoocMatrix& cooc, unsigned k) {
  if (cooc.empty()) throw DataError("SPPMI over an empty co-occurrence matrix");
  if (k == 0) throw DataError("SPPMI shift k must be >= 1");

  std::size_t max_id = 0;
  for (const auto& [key, w] : cooc.cells()) {
    (void)w;
    max_id = std::max(max_id,
                      static_cast<std::size_t>(key & 0xFFFFFFFFu));
  }
  const std::vector<double> marg = cooc.marginals(max_id + 1);
  const double total = cooc.total();
  const double shift = std::log(static_cast<double>(k));

  train::CoocMatrix out;
  for (const auto& [key, w] : cooc.cells()) {
    auto i = static_cast<std::uint32_t>(key >> 32);
    auto j = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
    const double pmi = std::log(w * total / (marg[i] * marg[j]));
    const double value = pmi - shift;
    if (value > 0.0) out.add(i, j, value);
  }
  return out;
}

}  // namespace embedkit::stats
