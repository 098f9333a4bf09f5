#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "embedkit/cooc.hpp"
#include "embedkit/corpstats.hpp"
#include "embedkit/embedding.hpp"
#include "embedkit/textpipe.hpp"

namespace embedkit::io {

// Reads an already-cleaned corpus (one sentence per line, space-separated
// tokens). Validates UTF-8.
textpipe::TokenStream read_corpus(const std::filesystem::path& path);

// Text vector format: header "V D", then one "token v_1 .. v_D" line per
// word, full-precision decimal.
void write_vectors(const std::filesystem::path& path, const Embedding& e);
Embedding read_vectors(const std::filesystem::path& path);

// Binary checkpoint, version 1: "EKVB" magic, u32 version, u64 V, u64 D,
// V length-prefixed UTF-8 tokens (u32 byte count), then V*D
// little-endian doubles.
void write_vectors_binary(const std::filesystem::path& path,
                          const Embedding& e);
Embedding read_vectors_binary(const std::filesystem::path& path);

// Reads either vector format, sniffed by the magic bytes.
Embedding load_embedding(const std::filesystem::path& path);

// "token<TAB>count", descending count.
void write_vocab_tsv(const std::filesystem::path& path,
                     const std::vector<std::string>& tokens,
                     const std::vector<std::uint64_t>& counts);

// "item<TAB>count<TAB>share" with a one-line header.
void write_freq_table(const std::filesystem::path& path,
                      const stats::FreqTable& table,
                      const std::string& item_header);

void write_zipf_json(const std::filesystem::path& path,
                     const stats::ZipfFit& fit);

// "i<TAB>j<TAB>weight", one stored (unordered) cell per line, sorted.
void write_cooc_tsv(const std::filesystem::path& path,
                    const train::CoocMatrix& cooc);

std::string format_double(double value);

}  // namespace embedkit::io
