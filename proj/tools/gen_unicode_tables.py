#!/usr/bin/env python3
"""Regenerates src/unicode_data.cpp from Python's unicodedata module.

Emits canonical decomposition / composition / combining-class tables plus
general-category range tables (letters, marks, format, whitespace) and the
Latin simple-lowercase map. Hangul syllables are excluded everywhere; the
C++ side decomposes and composes them algorithmically.

Usage: python3 tools/gen_unicode_tables.py > src/unicode_data.cpp
"""

import sys
import unicodedata

MAX_CP = 0x110000
HANGUL_BASE = 0xAC00
HANGUL_END = 0xAC00 + 11172


def is_hangul_syllable(cp):
    return HANGUL_BASE <= cp < HANGUL_END


def surrogate(cp):
    return 0xD800 <= cp <= 0xDFFF


def gather_decompositions():
    """cp -> full canonical decomposition (NFD), only where it differs."""
    out = {}
    for cp in range(MAX_CP):
        if surrogate(cp) or is_hangul_syllable(cp):
            continue
        c = chr(cp)
        d = unicodedata.normalize("NFD", c)
        if d != c:
            out[cp] = [ord(x) for x in d]
    return out


def gather_compositions():
    """(starter, combiner) -> composite, exclusions handled by NFC roundtrip."""
    pairs = {}
    for cp in range(MAX_CP):
        if surrogate(cp) or is_hangul_syllable(cp):
            continue
        c = chr(cp)
        raw = unicodedata.decomposition(c)
        if not raw or raw.startswith("<"):
            continue
        parts = [int(p, 16) for p in raw.split()]
        if len(parts) != 2:
            continue
        a, b = parts
        if unicodedata.combining(chr(a)) != 0:
            continue
        if unicodedata.normalize("NFC", chr(a) + chr(b)) == c:
            pairs[(a, b)] = cp
    return pairs


def gather_ccc():
    out = {}
    for cp in range(MAX_CP):
        if surrogate(cp):
            continue
        k = unicodedata.combining(chr(cp))
        if k:
            out[cp] = k
    return out


def category_ranges(pred):
    ranges = []
    start = None
    for cp in range(MAX_CP):
        ok = not surrogate(cp) and pred(cp)
        if ok and start is None:
            start = cp
        elif not ok and start is not None:
            ranges.append((start, cp - 1))
            start = None
    if start is not None:
        ranges.append((start, MAX_CP - 1))
    return ranges


def main():
    decomp = gather_decompositions()
    comp = gather_compositions()
    ccc = gather_ccc()

    letter = category_ranges(lambda cp: unicodedata.category(chr(cp))[0] == "L")
    mark = category_ranges(lambda cp: unicodedata.category(chr(cp))[0] == "M")
    fmt = category_ranges(lambda cp: unicodedata.category(chr(cp)) == "Cf")
    space = category_ranges(lambda cp: chr(cp).isspace())

    lower = {}
    for cp in range(0x250):
        lo = chr(cp).lower()
        if len(lo) == 1 and ord(lo) != cp:
            lower[cp] = ord(lo)

    w = sys.stdout.write
    w("// Generated by tools/gen_unicode_tables.py (Unicode %s via Python %s).\n"
      % (unicodedata.unidata_version, ".".join(map(str, sys.version_info[:3]))))
    w("// Do not edit by hand.\n\n")
    w('#include "embedkit/unicode_data.hpp"\n\n')
    w("namespace embedkit::uni::data {\n\n")

    pool = []
    entries = []
    for cp in sorted(decomp):
        seq = decomp[cp]
        entries.append((cp, len(pool), len(seq)))
        pool.extend(seq)
    w("const DecompEntry kDecomp[] = {\n")
    for cp, off, n in entries:
        w("  {0x%X,%d,%d},\n" % (cp, off, n))
    w("};\n")
    w("const int kDecompCount = %d;\n" % len(entries))
    w("const char32_t kDecompPool[] = {\n")
    for i in range(0, len(pool), 12):
        w("  " + ",".join("0x%X" % x for x in pool[i:i + 12]) + ",\n")
    w("};\n\n")

    w("const CompEntry kComp[] = {\n")
    for (a, b), c in sorted(comp.items()):
        w("  {0x%X,0x%X,0x%X},\n" % (a, b, c))
    w("};\n")
    w("const int kCompCount = %d;\n\n" % len(comp))

    w("const CccEntry kCcc[] = {\n")
    for cp in sorted(ccc):
        w("  {0x%X,%d},\n" % (cp, ccc[cp]))
    w("};\n")
    w("const int kCccCount = %d;\n\n" % len(ccc))

    def emit_ranges(name, ranges):
        w("const Range k%s[] = {\n" % name)
        for a, b in ranges:
            w("  {0x%X,0x%X},\n" % (a, b))
        w("};\n")
        w("const int k%sCount = %d;\n\n" % (name, len(ranges)))

    emit_ranges("Letter", letter)
    emit_ranges("Mark", mark)
    emit_ranges("Format", fmt)
    emit_ranges("Space", space)

    w("const LowerEntry kLatinLower[] = {\n")
    for cp in sorted(lower):
        w("  {0x%X,0x%X},\n" % (cp, lower[cp]))
    w("};\n")
    w("const int kLatinLowerCount = %d;\n\n" % len(lower))

    w("}  // namespace embedkit::uni::data\n")


if __name__ == "__main__":
    main()
