#include "embedkit/textpipe.hpp"

#include <fstream>
#include <sstream>

#include "embedkit/errors.hpp"
#include "embedkit/unicode.hpp"

namespace embedkit::textpipe {
namespace {

bool is_tracked_digit(char32_t cp) {
  return (cp >= U'0' && cp <= U'9') || (cp >= 0x0660 && cp <= 0x0669) ||
         (cp >= 0x06F0 && cp <= 0x06F9);
}

bool starts_with(const std::u32string_view s, std::u32string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

bool looks_like_email(std::u32string_view token) {
  auto at = token.find(U'@');
  return at != std::u32string_view::npos && at > 0 && at + 1 < token.size();
}

bool looks_like_url(std::u32string_view token) {
  return starts_with(token, U"http://") || starts_with(token, U"https://") ||
         starts_with(token, U"www.");
}

}  // namespace

std::string concatenate_inputs(const std::vector<std::filesystem::path>& paths) {
  std::string combined;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read input file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string bytes = buf.str();

    std::u32string cps;
    std::size_t bad = 0;
    if (!uni::decode_utf8(bytes, cps, bad)) {
      throw DataError("invalid UTF-8 in " + path.string() + " at byte offset " +
                      std::to_string(bad));
    }
    std::size_t start = (!cps.empty() && cps.front() == 0xFEFF) ? 1 : 0;

    std::u32string doc;
    doc.reserve(cps.size());
    for (std::size_t i = start; i < cps.size(); ++i) {
      if (cps[i] == U'\r') {
        if (i + 1 < cps.size() && cps[i + 1] == U'\n') continue;
        doc.push_back(U'\n');
      } else {
        doc.push_back(cps[i]);
      }
    }
    std::string text = uni::encode_utf8(doc);
    if (text.empty()) continue;
    if (!combined.empty() && combined.back() != '\n') combined.push_back('\n');
    combined += text;
  }
  return combined;
}

std::string replace_symbols(std::string_view text, const CleanConfig& config) {
  std::u32string cps = uni::decode_utf8(text);
  for (auto& cp : cps)
    if (config.replacement_symbols.count(cp)) cp = U' ';
  return uni::encode_utf8(cps);
}

std::string strip_noise(std::string_view text, const CleanConfig& config) {
  std::u32string cps = uni::decode_utf8(text);

  // Tag spans. The closing '>' must sit on the same line; an unmatched '<'
  // falls through to the special-character rule below.
  if (config.strip_html) {
    std::u32string out;
    out.reserve(cps.size());
    for (std::size_t i = 0; i < cps.size();) {
      if (cps[i] == U'<') {
        std::size_t j = i + 1;
        while (j < cps.size() && cps[j] != U'>' && cps[j] != U'\n') ++j;
        if (j < cps.size() && cps[j] == U'>') {
          out.push_back(U' ');
          i = j + 1;
          continue;
        }
      }
      out.push_back(cps[i]);
      ++i;
    }
    cps.swap(out);
  }

  // Email / URL tokens vanish outright; the whitespace around them already
  // separates their neighbors.
  if (config.strip_emails_urls) {
    std::u32string out;
    out.reserve(cps.size());
    std::size_t i = 0;
    while (i < cps.size()) {
      if (uni::is_space(cps[i])) {
        out.push_back(cps[i]);
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < cps.size() && !uni::is_space(cps[j])) ++j;
      std::u32string_view token(cps.data() + i, j - i);
      if (!looks_like_email(token) && !looks_like_url(token)) out += token;
      i = j;
    }
    cps.swap(out);
  }

  std::u32string out;
  out.reserve(cps.size());
  for (std::size_t i = 0; i < cps.size();) {
    char32_t cp = cps[i];
    if (config.strip_numerics && is_tracked_digit(cp)) {
      while (i < cps.size() && is_tracked_digit(cps[i])) ++i;
      out.push_back(U' ');
      continue;
    }
    if (uni::is_format(cp)) {
      ++i;  // deleted, not spaced: keeps joiner-connected words whole
      continue;
    }
    bool keep = uni::is_letter(cp) || uni::is_mark(cp) || uni::is_space(cp) ||
                (!config.strip_numerics && is_tracked_digit(cp));
    out.push_back(keep ? cp : U' ');
    ++i;
  }
  return uni::encode_utf8(out);
}

TokenStream tokenize(std::string_view text) {
  TokenStream stream;
  std::u32string cps = uni::decode_utf8(text);
  std::vector<std::string> sentence;
  std::u32string token;
  auto flush_token = [&] {
    if (!token.empty()) {
      sentence.push_back(uni::encode_utf8(token));
      token.clear();
    }
  };
  auto flush_sentence = [&] {
    flush_token();
    if (!sentence.empty()) {
      stream.total_tokens += sentence.size();
      stream.sentences.push_back(std::move(sentence));
      sentence.clear();
    }
  };
  for (char32_t cp : cps) {
    if (cp == U'\n')
      flush_sentence();
    else if (uni::is_space(cp))
      flush_token();
    else
      token.push_back(cp);
  }
  flush_sentence();
  return stream;
}

TokenStream normalize(TokenStream stream, const CleanConfig& config) {
  TokenStream out;
  for (auto& sentence : stream.sentences) {
    std::vector<std::string> kept;
    kept.reserve(sentence.size());
    for (auto& token : sentence) {
      std::u32string cps = uni::decode_utf8(token);
      if (config.lowercase)
        for (auto& cp : cps) cp = uni::lower_latin(cp);
      cps = uni::nfc(cps);
      if (config.drop_foreign_script) {
        bool all_latin = true;
        for (char32_t cp : cps)
          if (!uni::is_basic_latin_letter(cp)) {
            all_latin = false;
            break;
          }
        if (all_latin) continue;
      }
      std::string normalized = uni::encode_utf8(cps);
      if (config.collapse_consecutive_duplicates && !kept.empty() &&
          kept.back() == normalized)
        continue;
      kept.push_back(std::move(normalized));
    }
    if (!kept.empty()) {
      out.total_tokens += kept.size();
      out.sentences.push_back(std::move(kept));
    }
  }
  return out;
}

std::unordered_set<std::string> load_stoplist(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read stoplist: " + path.string());
  std::unordered_set<std::string> stoplist;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::u32string cps;
    std::size_t bad = 0;
    if (!uni::decode_utf8(line, cps, bad))
      throw DataError("invalid UTF-8 in stoplist " + path.string());
    stoplist.insert(uni::encode_utf8(uni::nfc(cps)));
  }
  return stoplist;
}

TokenStream filter_stopwords(TokenStream stream,
                             const std::unordered_set<std::string>& stoplist) {
  if (stoplist.empty()) return stream;
  TokenStream out;
  for (auto& sentence : stream.sentences) {
    std::vector<std::string> kept;
    kept.reserve(sentence.size());
    for (auto& token : sentence)
      if (!stoplist.count(token)) kept.push_back(std::move(token));
    if (!kept.empty()) {
      out.total_tokens += kept.size();
      out.sentences.push_back(std::move(kept));
    }
  }
  return out;
}

TokenStream clean_text(std::string_view raw, const CleanConfig& config) {
  std::string replaced = replace_symbols(raw, config);
  std::string stripped = strip_noise(replaced, config);
  TokenStream stream = normalize(tokenize(stripped), config);
  if (config.stopword_file)
    stream = filter_stopwords(std::move(stream),
                              load_stoplist(*config.stopword_file));
  return stream;
}

TokenStream clean(const std::vector<std::filesystem::path>& paths,
                  const CleanConfig& config) {
  return clean_text(concatenate_inputs(paths), config);
}

std::string to_text(const TokenStream& stream) {
  std::string out;
  for (const auto& sentence : stream.sentences) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      if (i) out.push_back(' ');
      out += sentence[i];
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace embedkit::textpipe
