#pragma once

#include <cstdint>

// Tables generated from the Unicode character database; see
// tools/gen_unicode_tables.py. All arrays are sorted by code point
// (kComp by (first, second)) for binary search.
namespace embedkit::uni::data {

struct DecompEntry {
  char32_t cp;
  std::int32_t offset;
  std::int32_t len;
};

struct CompEntry {
  char32_t first;
  char32_t second;
  char32_t composite;
};

struct CccEntry {
  char32_t cp;
  std::uint8_t ccc;
};

struct Range {
  char32_t lo;
  char32_t hi;
};

struct LowerEntry {
  char32_t cp;
  char32_t lower;
};

extern const DecompEntry kDecomp[];
extern const int kDecompCount;
extern const char32_t kDecompPool[];

extern const CompEntry kComp[];
extern const int kCompCount;

extern const CccEntry kCcc[];
extern const int kCccCount;

extern const Range kLetter[];
extern const int kLetterCount;
extern const Range kMark[];
extern const int kMarkCount;
extern const Range kFormat[];
extern const int kFormatCount;
extern const Range kSpace[];
extern const int kSpaceCount;

extern const LowerEntry kLatinLower[];
extern const int kLatinLowerCount;

}  // namespace embedkit::uni::data
