#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace embedkit::textpipe {

// Cleaning pipeline configuration. Stage order is fixed (concatenate,
// replace_symbols, strip_noise, tokenize, normalize, filter_stopwords);
// the flags only switch individual rules on or off.
struct CleanConfig {
  // Punctuation replaced by a space before tokenization. Defaults cover
  // full stop, hyphen, apostrophe, comma, straight and curly quotes,
  // exclamation and question marks plus their Arabic-script forms.
  std::unordered_set<char32_t> replacement_symbols = {
      U'.', U'-', U'\'', U',', U'"', U'‘', U'’', U'“',
      U'”', U'!', U'?', U'؟', U'،', U'۔'};
  bool strip_html = true;
  bool strip_numerics = true;
  bool strip_emails_urls = true;
  bool drop_foreign_script = true;
  bool collapse_consecutive_duplicates = false;
  bool lowercase = true;
  std::optional<std::filesystem::path> stopword_file;
};

// Sentence-delimited token sequence. Sentences are newline-delimited in
// the source text; tokens are non-empty and whitespace-free.
struct TokenStream {
  std::vector<std::vector<std::string>> sentences;
  std::size_t total_tokens = 0;

  void recount() {
    total_tokens = 0;
    for (const auto& s : sentences) total_tokens += s.size();
  }
};

// Reads and concatenates UTF-8 documents, one newline between documents.
// Leading byte order marks are dropped and CR/CRLF line ends folded to LF.
// Throws DataError on unreadable paths or invalid UTF-8 (with byte offset).
std::string concatenate_inputs(const std::vector<std::filesystem::path>& paths);

// Every replacement symbol becomes a single space; everything else is kept.
std::string replace_symbols(std::string_view text, const CleanConfig& config);

// Removes web noise: HTML tag spans become one space; email and URL tokens
// are dropped; digit runs (ASCII and Arabic-Indic) become one space; format
// characters are deleted; remaining non-letter, non-mark characters become
// one space.
std::string strip_noise(std::string_view text, const CleanConfig& config);

// Newline -> sentence, whitespace runs -> token boundaries.
TokenStream tokenize(std::string_view text);

// Lowercases Latin letters, applies NFC, drops all-Basic-Latin tokens and
// collapses immediate repeats, per the config flags.
TokenStream normalize(TokenStream stream, const CleanConfig& config);

// UTF-8 stoplist, one token per line. Entries are NFC-normalized.
std::unordered_set<std::string> load_stoplist(const std::filesystem::path& path);

TokenStream filter_stopwords(TokenStream stream,
                             const std::unordered_set<std::string>& stoplist);

// Full pipeline over input files, honoring config.stopword_file when set.
TokenStream clean(const std::vector<std::filesystem::path>& paths,
                  const CleanConfig& config);

// Full pipeline minus concatenation, for already-loaded text.
TokenStream clean_text(std::string_view raw, const CleanConfig& config);

// Output contract: one sentence per line, tokens space-separated,
// trailing newline.
std::string to_text(const TokenStream& stream);

}  // namespace embedkit::textpipe
