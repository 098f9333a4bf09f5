#include "embedkit/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "embedkit/errors.hpp"
#include "embedkit/unicode.hpp"

namespace embedkit::io {

textpipe::TokenStream read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read corpus: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  std::u32string cps;
  std::size_t bad = 0;
  if (!uni::decode_utf8(bytes, cps, bad))
    throw DataError("invalid UTF-8 in " + path.string() + " at byte offset " +
                    std::to_string(bad));
  return textpipe::tokenize(bytes);
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_vectors(const std::filesystem::path& path, const Embedding& e) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vectors to " + path.string());
  out << e.size() << ' ' << e.dim() << '\n';
  for (std::size_t w = 0; w < e.size(); ++w) {
    out << e.tokens[w];
    for (double v : e.vectors.row(w)) out << ' ' << format_double(v);
    out << '\n';
  }
  if (!out) throw DataError("write failed for " + path.string());
}

Embedding read_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read vectors from " + path.string());
  std::size_t v = 0, d = 0;
  std::string header;
  if (!std::getline(in, header)) throw DataError("empty vector file: " + path.string());
  {
    std::istringstream hs(header);
    if (!(hs >> v >> d) || v == 0 || d == 0)
      throw DataError("malformed vector header in " + path.string());
  }
  Embedding e;
  e.tokens.resize(v);
  e.vectors = Matrix(v, d);
  for (std::size_t w = 0; w < v; ++w) {
    if (!(in >> e.tokens[w]))
      throw DataError("truncated vector file: " + path.string());
    auto row = e.vectors.row(w);
    for (std::size_t i = 0; i < d; ++i)
      if (!(in >> row[i]))
        throw DataError("truncated vector row in " + path.string() +
                        " for token " + e.tokens[w]);
  }
  e.build_index();
  return e;
}

namespace {

constexpr char kBinaryMagic[4] = {'E', 'K', 'V', 'B'};
constexpr std::uint32_t kBinaryVersion = 1;

template <typename T>
void put(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

template <typename T>
T take(std::ifstream& in, const std::filesystem::path& path) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(value)))
    throw DataError("truncated binary vectors: " + path.string());
  return value;
}

}  // namespace

void write_vectors_binary(const std::filesystem::path& path,
                          const Embedding& e) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vectors to " + path.string());
  out.write(kBinaryMagic, 4);
  put<std::uint32_t>(out, kBinaryVersion);
  put<std::uint64_t>(out, e.size());
  put<std::uint64_t>(out, e.dim());
  for (const auto& token : e.tokens) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(token.size()));
    out.write(token.data(), static_cast<std::streamsize>(token.size()));
  }
  out.write(reinterpret_cast<const char*>(e.vectors.data().data()),
            static_cast<std::streamsize>(e.vectors.data().size() *
                                         sizeof(double)));
  if (!out) throw DataError("write failed for " + path.string());
}

Embedding read_vectors_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read vectors from " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kBinaryMagic, 4) != 0)
    throw DataError("not a binary vector file: " + path.string());
  const auto version = take<std::uint32_t>(in, path);
  if (version != kBinaryVersion)
    throw DataError("unsupported vector file version " +
                    std::to_string(version) + " in " + path.string());
  const auto v = take<std::uint64_t>(in, path);
  const auto d = take<std::uint64_t>(in, path);
  Embedding e;
  e.tokens.resize(v);
  for (auto& token : e.tokens) {
    const auto bytes = take<std::uint32_t>(in, path);
    token.resize(bytes);
    if (!in.read(token.data(), bytes))
      throw DataError("truncated binary vectors: " + path.string());
  }
  e.vectors = Matrix(v, d);
  if (!in.read(reinterpret_cast<char*>(e.vectors.data().data()),
               static_cast<std::streamsize>(v * d * sizeof(double))))
    throw DataError("truncated binary vectors: " + path.string());
  e.build_index();
  return e;
}

Embedding load_embedding(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw DataError("cannot read vectors from " + path.string());
  char magic[4] = {};
  probe.read(magic, 4);
  probe.close();
  if (probe.gcount() == 4 && std::memcmp(magic, kBinaryMagic, 4) == 0)
    return read_vectors_binary(path);
  return read_vectors(path);
}

void write_vocab_tsv(const std::filesystem::path& path,
                     const std::vector<std::string>& tokens,
                     const std::vector<std::uint64_t>& counts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocabulary to " + path.string());
  for (std::size_t i = 0; i < tokens.size(); ++i)
    out << tokens[i] << '\t' << counts[i] << '\n';
}

void write_freq_table(const std::filesystem::path& path,
                      const stats::FreqTable& table,
                      const std::string& item_header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write report to " + path.string());
  out << item_header << "\tcount\tshare\n";
  for (const auto& e : table.entries)
    out << e.item << '\t' << e.count << '\t' << format_double(e.share) << '\n';
}

void write_zipf_json(const std::filesystem::path& path,
                     const stats::ZipfFit& fit) {
  nlohmann::json j{{"a", fit.a},
                   {"b", fit.b},
                   {"r_squared", fit.r_squared},
                   {"n_ranks", fit.n_ranks}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write report to " + path.string());
  out << j.dump(2) << '\n';
}

void write_cooc_tsv(const std::filesystem::path& path,
                    const train::CoocMatrix& cooc) {
  std::vector<std::pair<std::uint64_t, double>> cells(cooc.cells().begin(),
                                                      cooc.cells().end());
  std::sort(cells.begin(), cells.end());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write co-occurrence dump to " + path.string());
  for (const auto& [key, w] : cells)
    out << (key >> 32) << '\t' << (key & 0xFFFFFFFFu) << '\t'
        << format_double(w) << '\n';
}

}  // namespace embedkit::io
