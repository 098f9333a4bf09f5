#include "embedkit/unicode.hpp"

#include <algorithm>
#include <cstdint>

#include "embedkit/unicode_data.hpp"

namespace embedkit::uni {
namespace {

constexpr char32_t kHangulSBase = 0xAC00;
constexpr char32_t kHangulLBase = 0x1100;
constexpr char32_t kHangulVBase = 0x1161;
constexpr char32_t kHangulTBase = 0x11A7;
constexpr int kHangulLCount = 19;
constexpr int kHangulVCount = 21;
constexpr int kHangulTCount = 28;
constexpr int kHangulNCount = kHangulVCount * kHangulTCount;
constexpr int kHangulSCount = kHangulLCount * kHangulNCount;

bool in_ranges(const data::Range* ranges, int n, char32_t cp) {
  int lo = 0, hi = n - 1;
  while (lo <= hi) {
    int mid = (lo + hi) / 2;
    if (cp < ranges[mid].lo)
      hi = mid - 1;
    else if (cp > ranges[mid].hi)
      lo = mid + 1;
    else
      return true;
  }
  return false;
}

const data::DecompEntry* find_decomp(char32_t cp) {
  int lo = 0, hi = data::kDecompCount - 1;
  while (lo <= hi) {
    int mid = (lo + hi) / 2;
    if (cp < data::kDecomp[mid].cp)
      hi = mid - 1;
    else if (cp > data::kDecomp[mid].cp)
      lo = mid + 1;
    else
      return &data::kDecomp[mid];
  }
  return nullptr;
}

char32_t find_composite(char32_t a, char32_t b) {
  int lo = 0, hi = data::kCompCount - 1;
  while (lo <= hi) {
    int mid = (lo + hi) / 2;
    const auto& e = data::kComp[mid];
    if (a < e.first || (a == e.first && b < e.second))
      hi = mid - 1;
    else if (a > e.first || b > e.second)
      lo = mid + 1;
    else
      return e.composite;
  }
  return 0;
}

void decompose_cp(char32_t cp, std::u32string& out) {
  if (cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount) {
    char32_t s = cp - kHangulSBase;
    out.push_back(kHangulLBase + s / kHangulNCount);
    out.push_back(kHangulVBase + (s % kHangulNCount) / kHangulTCount);
    char32_t t = s % kHangulTCount;
    if (t) out.push_back(kHangulTBase + t);
    return;
  }
  if (const auto* e = find_decomp(cp)) {
    for (int i = 0; i < e->len; ++i)
      out.push_back(data::kDecompPool[e->offset + i]);
    return;
  }
  out.push_back(cp);
}

}  // namespace

bool decode_utf8(std::string_view bytes, std::u32string& out,
                 std::size_t& bad_offset) {
  out.clear();
  out.reserve(bytes.size());
  std::size_t i = 0;
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  while (i < n) {
    unsigned char b0 = p[i];
    char32_t cp;
    std::size_t len;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      bad_offset = i;
      return false;
    }
    if (i + len > n) {
      bad_offset = i;
      return false;
    }
    for (std::size_t k = 1; k < len; ++k) {
      if ((p[i + k] & 0xC0) != 0x80) {
        bad_offset = i;
        return false;
      }
      cp = (cp << 6) | (p[i + k] & 0x3F);
    }
    // Reject overlongs, surrogates and out-of-range values.
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      bad_offset = i;
      return false;
    }
    out.push_back(cp);
    i += len;
  }
  return true;
}

std::u32string decode_utf8(std::string_view bytes) {
  std::u32string out;
  std::size_t off = 0;
  decode_utf8(bytes, out, off);
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

std::size_t count_codepoints(std::string_view valid_utf8) {
  std::size_t n = 0;
  for (unsigned char b : valid_utf8)
    if ((b & 0xC0) != 0x80) ++n;
  return n;
}

bool is_letter(char32_t cp) {
  return in_ranges(data::kLetter, data::kLetterCount, cp);
}

bool is_mark(char32_t cp) {
  return in_ranges(data::kMark, data::kMarkCount, cp);
}

bool is_format(char32_t cp) {
  return in_ranges(data::kFormat, data::kFormatCount, cp);
}

bool is_space(char32_t cp) {
  return in_ranges(data::kSpace, data::kSpaceCount, cp);
}

bool is_basic_latin_letter(char32_t cp) {
  return (cp >= U'A' && cp <= U'Z') || (cp >= U'a' && cp <= U'z');
}

std::uint8_t combining_class(char32_t cp) {
  int lo = 0, hi = data::kCccCount - 1;
  while (lo <= hi) {
    int mid = (lo + hi) / 2;
    if (cp < data::kCcc[mid].cp)
      hi = mid - 1;
    else if (cp > data::kCcc[mid].cp)
      lo = mid + 1;
    else
      return data::kCcc[mid].ccc;
  }
  return 0;
}

char32_t lower_latin(char32_t cp) {
  if (cp > 0x24F) return cp;
  int lo = 0, hi = data::kLatinLowerCount - 1;
  while (lo <= hi) {
    int mid = (lo + hi) / 2;
    if (cp < data::kLatinLower[mid].cp)
      hi = mid - 1;
    else if (cp > data::kLatinLower[mid].cp)
      lo = mid + 1;
    else
      return data::kLatinLower[mid].lower;
  }
  return cp;
}

std::u32string nfd(std::u32string_view in) {
  std::u32string out;
  out.reserve(in.size());
  for (char32_t cp : in) decompose_cp(cp, out);
  // Canonical ordering: stable bubble of combining marks.
  for (std::size_t i = 1; i < out.size(); ++i) {
    std::uint8_t ccc = combining_class(out[i]);
    if (ccc == 0) continue;
    std::size_t j = i;
    while (j > 0 && combining_class(out[j - 1]) > ccc) {
      std::swap(out[j - 1], out[j]);
      --j;
    }
  }
  return out;
}

std::u32string nfc(std::u32string_view in) {
  std::u32string d = nfd(in);
  if (d.empty()) return d;
  std::u32string out;
  out.reserve(d.size());
  // Composition walks the decomposed string keeping track of the last
  // starter position in `out`.
  std::ptrdiff_t starter = -1;
  int last_ccc = -1;  // ccc of the previous (uncomposed) character
  for (char32_t cp : d) {
    int ccc = combining_class(cp);
    if (starter >= 0 && last_ccc < ccc) {
      char32_t a = out[starter];
      char32_t composed = 0;
      // Algorithmic Hangul composition.
      if (a >= kHangulLBase && a < kHangulLBase + kHangulLCount &&
          cp >= kHangulVBase && cp < kHangulVBase + kHangulVCount) {
        composed = kHangulSBase + ((a - kHangulLBase) * kHangulVCount +
                                   (cp - kHangulVBase)) * kHangulTCount;
      } else if (a >= kHangulSBase && a < kHangulSBase + kHangulSCount &&
                 (a - kHangulSBase) % kHangulTCount == 0 &&
                 cp > kHangulTBase && cp < kHangulTBase + kHangulTCount) {
        composed = a + (cp - kHangulTBase);
      } else {
        composed = find_composite(a, cp);
      }
      if (composed) {
        out[starter] = composed;
        continue;
      }
    }
    if (ccc == 0) {
      starter = static_cast<std::ptrdiff_t>(out.size());
      last_ccc = -1;
    } else {
      last_ccc = ccc;
    }
    out.push_back(cp);
  }
  return out;
}

std::string nfc_utf8(std::string_view token) {
  return encode_utf8(nfc(decode_utf8(token)));
}

}  // namespace embedkit::uni
