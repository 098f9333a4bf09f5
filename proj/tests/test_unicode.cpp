#include <doctest.h>

#include <string>

#include "embedkit/unicode.hpp"

using namespace embedkit;

namespace {

std::string nfc_bytes(std::string_view in) { return uni::nfc_utf8(in); }

}  // namespace

TEST_CASE("utf8 round trip and validation") {
  std::u32string cps;
  std::size_t bad = 0;
  CHECK(uni::decode_utf8("hello \xd8\xb3\xd9\x86\xd8\xaf", cps, bad));
  CHECK(cps.size() == 9);
  CHECK(uni::encode_utf8(cps) == "hello \xd8\xb3\xd9\x86\xd8\xaf");

  CHECK_FALSE(uni::decode_utf8("ab\xffxy", cps, bad));
  CHECK(bad == 2);
  // Overlong encoding of '/'.
  CHECK_FALSE(uni::decode_utf8(std::string("\xc0\xaf"), cps, bad));
  CHECK(bad == 0);
  // Truncated sequence.
  CHECK_FALSE(uni::decode_utf8(std::string("\xe0\xa4"), cps, bad));
  // Surrogate half.
  CHECK_FALSE(uni::decode_utf8(std::string("\xed\xa0\x80"), cps, bad));
}

// Expected bytes computed with Python's unicodedata.normalize("NFC", ...).
TEST_CASE("nfc matches the unicodedata oracle") {
  CHECK(nfc_bytes("\x63\x61\x66\x65\xcc\x81") == "\x63\x61\x66\xc3\xa9");
  CHECK(nfc_bytes("\x41\xcc\x8a") == "\xc3\x85");
  CHECK(nfc_bytes("\xd9\x85\xd9\x8e\xd8\xb1\xd9\x92") ==
        "\xd9\x85\xd9\x8e\xd8\xb1\xd9\x92");
  CHECK(nfc_bytes("\xd8\xa7\xd9\x93") == "\xd8\xa2");  // alef + madda
  CHECK(nfc_bytes("\xd8\xa8\xd9\x94") == uni::nfc_utf8("\xd8\xa8\xd9\x94"));
  CHECK(nfc_bytes("\xd9\x88\xd9\x94") == "\xd8\xa4");  // waw + hamza
  // Farsi yeh + hamza does not compose.
  CHECK(nfc_bytes("\xdb\x8c\xd9\x94") == "\xdb\x8c\xd9\x94");
  // Combining-mark reordering by canonical class.
  CHECK(nfc_bytes("\x71\xcc\x87\xcc\xa3") == "\x71\xcc\xa3\xcc\x87");
  CHECK(nfc_bytes("\x71\xcc\xa3\xcc\x87") == "\x71\xcc\xa3\xcc\x87");
  // Hangul: L+V+T and LV+T both compose to the LVT syllable.
  CHECK(nfc_bytes("\xe1\x84\x80\xe1\x85\xa1\xe1\x86\xa8") == "\xea\xb0\x81");
  CHECK(nfc_bytes("\xea\xb0\x80\xe1\x86\xa8") == "\xea\xb0\x81");
  // Devanagari stays put.
  CHECK(nfc_bytes("\xe0\xa4\xb8\xe0\xa4\xbf\xe0\xa4\xa8\xe0\xa5\x8d\xe0\xa4"
                  "\xa7\xe0\xa5\x80") ==
        "\xe0\xa4\xb8\xe0\xa4\xbf\xe0\xa4\xa8\xe0\xa5\x8d\xe0\xa4\xa7\xe0\xa5"
        "\x80");
  // Angstrom sign folds into A-ring.
  CHECK(nfc_bytes("\xc3\x85\xe2\x84\xab") == "\xc3\x85\xc3\x85");
  // Recomposition picks the canonical order first: d-dot-above + dot-below
  // becomes d-dot-below + combining dot above.
  CHECK(nfc_bytes("\xe1\xb8\x8b\xcc\xa3") == "\xe1\xb8\x8d\xcc\x87");
  // Composition exclusion (Tibetan).
  CHECK(nfc_bytes("\xe0\xbe\xb2\xe0\xbe\x80") == "\xe0\xbe\xb2\xe0\xbe\x80");
}

TEST_CASE("nfc is idempotent") {
  const char* samples[] = {
      "\x63\x61\x66\x65\xcc\x81", "\xd8\xa7\xd9\x93\xd8\xa8",
      "\xe1\x84\x80\xe1\x85\xa1\xe1\x86\xa8", "plain ascii",
      "\xe1\xb8\x8b\xcc\xa3\xcc\x81"};
  for (const char* s : samples) {
    const std::string once = uni::nfc_utf8(s);
    CHECK(uni::nfc_utf8(once) == once);
  }
}

TEST_CASE("character classes") {
  CHECK(uni::is_letter(U'a'));
  CHECK(uni::is_letter(0x0633));   // Arabic seen
  CHECK(uni::is_letter(0x06B3));   // gueh
  CHECK_FALSE(uni::is_letter(U'3'));
  CHECK_FALSE(uni::is_letter(U'@'));
  CHECK(uni::is_mark(0x064E));     // fatha
  CHECK(uni::is_mark(0x0301));     // combining acute
  CHECK_FALSE(uni::is_mark(U'a'));
  CHECK(uni::is_format(0xFEFF));
  CHECK(uni::is_format(0x200C));   // ZWNJ
  CHECK(uni::is_space(U' '));
  CHECK(uni::is_space(U'\t'));
  CHECK(uni::is_space(0x00A0));
  CHECK_FALSE(uni::is_space(U'x'));
  CHECK(uni::is_basic_latin_letter(U'Q'));
  CHECK_FALSE(uni::is_basic_latin_letter(0x00E9));  // é is not basic latin
  CHECK(uni::lower_latin(U'A') == U'a');
  CHECK(uni::lower_latin(0x00C9) == 0x00E9);
  CHECK(uni::lower_latin(0x0633) == 0x0633);  // Arabic is caseless
}
