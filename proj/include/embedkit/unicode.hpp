#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace embedkit::uni {

// Decodes UTF-8. On an invalid byte sequence returns false and sets
// bad_offset to the byte position of the offending sequence.
bool decode_utf8(std::string_view bytes, std::u32string& out,
                 std::size_t& bad_offset);

// Decodes UTF-8 that is already known to be valid (internal text).
std::u32string decode_utf8(std::string_view bytes);

void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(std::u32string_view cps);

std::size_t count_codepoints(std::string_view valid_utf8);

bool is_letter(char32_t cp);
bool is_mark(char32_t cp);
bool is_format(char32_t cp);
bool is_space(char32_t cp);

// A-Z / a-z only; the foreign-script heuristic keys off this range.
bool is_basic_latin_letter(char32_t cp);

std::uint8_t combining_class(char32_t cp);

// Simple lowercase mapping restricted to the Latin blocks (<= U+024F);
// everything else is returned unchanged.
char32_t lower_latin(char32_t cp);

// Canonical normalization. Hangul is handled algorithmically, everything
// else through the generated tables.
std::u32string nfd(std::u32string_view in);
std::u32string nfc(std::u32string_view in);

// NFC over a UTF-8 token (valid input assumed).
std::string nfc_utf8(std::string_view token);

}  // namespace embedkit::uni
