"""Text segmentation: homoglyph folding, paragraph/sentence/token hierarchy,
and the small rule tagger behind the tense and voice checks.

Everything here is pure and deterministic. Homoglyph folding runs once at
segmentation entry so that downstream feature values are exactly invariant
under Cyrillic lookalike injection.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources


class PosTag(Enum):
    VB = "VB"
    VBD = "VBD"
    VBG = "VBG"
    VBN = "VBN"
    VBP = "VBP"
    VBZ = "VBZ"
    MD = "MD"
    OTHER = "OTHER"


@dataclass(frozen=True)
class Sentence:
    text: str
    tokens: tuple[str, ...]
    tags: tuple[PosTag, ...]


@dataclass(frozen=True)
class Paragraph:
    text: str
    sentences: tuple[Sentence, ...]


@dataclass(frozen=True)
class SegmentedArticle:
    paragraphs: tuple[Paragraph, ...]

    def sentences(self) -> list[Sentence]:
        return [s for p in self.paragraphs for s in p.sentences]


# Cyrillic lookalikes folded back to Latin. The lowercase vowels are the
# attack surface; the rest are defensive.
_CONFUSABLES = {
    "а": "a", "е": "e", "о": "o",
    "А": "A", "Е": "E", "О": "O",
    "с": "c", "С": "C",
    "р": "p", "Р": "P",
    "х": "x", "Х": "X",
    "у": "y", "У": "Y",
    "і": "i", "І": "I",
    "ѕ": "s", "Ѕ": "S",
    "ј": "j", "Ј": "J",
}
_FOLD_TABLE = str.maketrans(_CONFUSABLES)

BE_FORMS = frozenset({"am", "is", "are", "was", "were", "be", "been", "being"})
_HAVE_FORMS = frozenset({"have", "has", "had", "having"})


def fold_homoglyphs(text: str) -> str:
    """Replace confusable codepoints with their Latin counterparts. Idempotent."""
    return text.translate(_FOLD_TABLE)


def _load_lines(filename: str) -> list[str]:
    raw = resources.files("jguard.data").joinpath(filename).read_text("utf-8")
    out = []
    for line in raw.splitlines():
        if not line or line.startswith("#"):
            continue
        out.append(line)
    return out


def _load_abbreviations() -> frozenset[str]:
    return frozenset(entry.lower() for entry in _load_lines("abbreviations.txt"))


def _load_lexicon() -> dict[str, str]:
    lex = {}
    for line in _load_lines("verb_lexicon.txt"):
        form, tag = line.split("\t")
        lex[form.lower()] = tag
    return lex


_ABBREVIATIONS = _load_abbreviations()
_LEXICON = _load_lexicon()
_BASE_VERBS = frozenset(f for f, t in _LEXICON.items() if t in ("VB", "VB_VBN", "VB_VBD_VBN"))


def split_paragraphs(text: str) -> list[str]:
    """Split on newlines, dropping segments without an alphabetic character."""
    return [seg for seg in text.split("\n") if any(ch.isalpha() for ch in seg)]


_CLOSERS = "\"')]”’"


def _attached_word(text: str, dot_index: int) -> str:
    """The whitespace-delimited chunk ending at text[dot_index], inclusive."""
    start = dot_index
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start:dot_index + 1]


def _suppressed_by_abbreviation(word: str) -> bool:
    w = word.lower()
    if w in _ABBREVIATIONS:
        return True
    # Inner periods of multi-dot entries: "a." and "a.m" sit inside "a.m."
    for entry in _ABBREVIATIONS:
        if "." in entry[:-1] and entry.startswith(w):
            return True
    return False


def split_sentences(paragraph: str) -> list[str]:
    """Rule-based sentence boundary detection on . ! ? with a stop list.

    A period never splits after an abbreviation-list entry or a single
    initial, and no terminator splits when the next word starts lowercase.
    """
    sentences = []
    start = 0
    i = 0
    n = len(paragraph)
    while i < n:
        ch = paragraph[i]
        if ch not in ".!?":
            i += 1
            continue
        j = i + 1
        while j < n and paragraph[j] in ".!?":
            j += 1
        last_term = j - 1
        while j < n and paragraph[j] in _CLOSERS:
            j += 1
        if j < n and not paragraph[j].isspace():
            i = j
            continue
        k = j
        while k < n and paragraph[k].isspace():
            k += 1
        if k < n and (paragraph[k].islower() or paragraph[k] == ","):
            i = j
            continue
        if all(c == "." for c in paragraph[i:last_term + 1]):
            word = _attached_word(paragraph, last_term)
            if _suppressed_by_abbreviation(word):
                i = j
                continue
            if len(word) == 2 and word[0].isupper() and word[1] == ".":
                i = j
                continue
        piece = paragraph[start:j].strip()
        if piece:
            sentences.append(piece)
        start = j
        i = j
    tail = paragraph[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


_RE_ELLIPSIS = re.compile(r"\.\.\.")
_RE_SYMBOL = re.compile(r"([,;:@#$%&!?(){}\[\]<>\"“”«»—–])")
_RE_DOUBLE_DASH = re.compile(r"--+")
_RE_NT = re.compile(r"(\w)(n't)\b", re.IGNORECASE)
_RE_CLITIC = re.compile(r"(\w)('(?:s|m|d|ll|re|ve))\b", re.IGNORECASE)
_RE_TRAIL_APOS = re.compile(r"(\w)'(\s|$)")
_RE_LEAD_APOS = re.compile(r"(^|\s)'(\w)")


def tokenize_words(sentence: str) -> list[str]:
    """Treebank-convention word tokenization.

    Punctuation becomes its own token, contractions split ("don't" ->
    "do", "n't"), abbreviations with internal periods stay whole, and the
    sentence-final period detaches. No characters are altered, so the
    whitespace-free concatenation of tokens equals the whitespace-free
    sentence.
    """
    s = _RE_ELLIPSIS.sub(" ... ", sentence)
    s = _RE_SYMBOL.sub(r" \1 ", s)
    s = _RE_DOUBLE_DASH.sub(lambda m: f" {m.group(0)} ", s)
    s = _RE_LEAD_APOS.sub(r"\1 ' \2", s)
    s = _RE_TRAIL_APOS.sub(r"\1 ' \2", s)
    s = _RE_NT.sub(r"\1 \2", s)
    s = _RE_CLITIC.sub(r"\1 \2", s)
    tokens = s.split()
    if tokens:
        last = tokens[-1]
        if len(last) > 1 and last.endswith(".") and "." not in last[:-1]:
            tokens[-1:] = [last[:-1], "."]
    return tokens


def _has_vowel(word: str) -> bool:
    return any(c in "aeiouy" for c in word)


def _context_has(tokens: list[str], i: int, forms: frozenset[str]) -> bool:
    for k in range(max(0, i - 3), i):
        if tokens[k].lower() in forms:
            return True
    return False


def _resolve_ambiguous(tag: str, tokens: list[str], tags: list[PosTag], i: int) -> PosTag:
    prev = tokens[i - 1].lower() if i > 0 else ""
    if prev == "to" or (i > 0 and tags[i - 1] is PosTag.MD):
        return PosTag.VB if tag != "VBD_VBN" else PosTag.VBD
    if _context_has(tokens, i, BE_FORMS) or _context_has(tokens, i, _HAVE_FORMS):
        return PosTag.VBN
    if tag == "VB_VBN":
        return PosTag.VB
    return PosTag.VBD


def pos_tag(tokens: list[str]) -> list[PosTag]:
    """One tag per token from the bundled lexicon plus suffix rules."""
    tags: list[PosTag] = []
    for i, tok in enumerate(tokens):
        low = tok.lower()
        entry = _LEXICON.get(low)
        if entry is not None:
            if entry in ("VBD_VBN", "VB_VBN", "VB_VBD_VBN"):
                tags.append(_resolve_ambiguous(entry, tokens, tags, i))
            else:
                tags.append(PosTag[entry])
            continue
        if not low.isalpha():
            tags.append(PosTag.OTHER)
            continue
        if low.endswith("ed") and len(low) >= 4 and _has_vowel(low[:-2]):
            if _context_has(tokens, i, BE_FORMS) or _context_has(tokens, i, _HAVE_FORMS):
                tags.append(PosTag.VBN)
            else:
                tags.append(PosTag.VBD)
            continue
        if low.endswith("ing") and len(low) >= 5 and _has_vowel(low[:-3]):
            tags.append(PosTag.VBG)
            continue
        if low.endswith("s") and not low.endswith("ss") and len(low) >= 3:
            stems = [low[:-1]]
            if low.endswith("es"):
                stems.append(low[:-2])
            if low.endswith("ies"):
                stems.append(low[:-3] + "y")
            if any(st in _BASE_VERBS for st in stems):
                tags.append(PosTag.VBZ)
                continue
        tags.append(PosTag.OTHER)
    return tags


def is_past_tense(tags: list[PosTag]) -> bool:
    return any(t is PosTag.VBD or t is PosTag.VBN for t in tags)


def is_passive(tokens: list[str], tags: list[PosTag]) -> bool:
    """Heuristic voice test: be-form followed by a VBN within three tokens,
    or a VBN directly followed by "by"."""
    n = len(tokens)
    for i in range(n):
        if tokens[i].lower() in BE_FORMS:
            for k in range(i + 1, min(i + 4, n)):
                if tags[k] is PosTag.VBN:
                    return True
        if tags[i] is PosTag.VBN and i + 1 < n and tokens[i + 1].lower() == "by":
            return True
    return False


def segment(article_text: str) -> SegmentedArticle:
    """Fold homoglyphs, then build the paragraph/sentence/token hierarchy."""
    folded = fold_homoglyphs(article_text)
    paragraphs = []
    for para_text in split_paragraphs(folded):
        sentences = []
        for sent_text in split_sentences(para_text):
            tokens = tokenize_words(sent_text)
            if not tokens:
                continue
            tags = pos_tag(tokens)
            sentences.append(Sentence(text=sent_text, tokens=tuple(tokens), tags=tuple(tags)))
        paragraphs.append(Paragraph(text=para_text, sentences=tuple(sentences)))
    return SegmentedArticle(paragraphs=tuple(paragraphs))
