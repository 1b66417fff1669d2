"""The 13 journalism style features and their L2-normalized vector.

Organization features (1-6) and punctuation features (7-10) are per-article
means; the format-violation features (11-13) are absolute counts over the
whole text, so their raw values can exceed 1. Normalization absorbs the
scale difference.

Style rule summary for the violation counters:
  dates   - months with a specific day must use the short forms Jan., Feb.,
            Aug., Sept., Oct., Nov. or Dec. (March through July are never
            shortened); month-plus-year must spell the month out with no
            comma between month and year.
  times   - numerals before lowercase "a.m."/"p.m." with both periods.
  numbers - zero through nine spelled out, numerals for 10 and above.
            Numerals inside recognized date or time phrases are exempt.
Unrecognized phrases are ignored rather than guessed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus
from .errors import NumericError
from .segment import SegmentedArticle, fold_homoglyphs, is_passive, is_past_tense, segment

FEATURE_NAMES = (
    "mean_word_count_sent",
    "mean_sent_count_para",
    "wc_lead_sent",
    "wc_lead_para",
    "passive_voice_count",
    "past_tense_count",
    "excl_per_para",
    "hash_per_para",
    "apos_per_para",
    "oxford_comma_per_para",
    "date_violations",
    "time_violations",
    "number_violations",
)

N_FEATURES = len(FEATURE_NAMES)


@dataclass
class FeatureVector:
    values: np.ndarray
    normalized: bool

    def __eq__(self, other):
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return self.normalized == other.normalized and np.array_equal(self.values, other.values)


def _is_word(token: str) -> bool:
    return any(c.isalpha() for c in token)


def _word_count(tokens) -> int:
    return sum(1 for t in tokens if _is_word(t))


def _mean(values) -> float:
    vals = list(values)
    return float(sum(vals) / len(vals)) if vals else 0.0


def extract_organization_features(seg: SegmentedArticle) -> tuple[float, ...]:
    """Features 1-6: sentence/paragraph sizing plus tense and voice rates."""
    sentences = seg.sentences()
    paragraphs = seg.paragraphs
    mean_wc_sent = _mean(_word_count(s.tokens) for s in sentences)
    mean_sc_para = _mean(
        sum(1 for s in p.sentences if any(c.isalpha() for c in s.text))
        for p in paragraphs
    )
    wc_lead_sent = float(_word_count(sentences[0].tokens)) if sentences else 0.0
    wc_lead_para = float(sum(len(s.tokens) for s in paragraphs[0].sentences)) if paragraphs else 0.0
    passive = _mean(
        sum(1 for s in p.sentences if is_passive(list(s.tokens), list(s.tags)))
        for p in paragraphs
    )
    past = _mean(
        sum(1 for s in p.sentences if is_past_tense(list(s.tags)))
        for p in paragraphs
    )
    return (mean_wc_sent, mean_sc_para, wc_lead_sent, wc_lead_para, passive, past)


_OXFORD_RE = re.compile(r",\s+(?:and|or)\b")


def extract_punctuation_features(seg: SegmentedArticle) -> tuple[float, ...]:
    """Features 7-10: mean per-paragraph counts of !, #, ' and the Oxford comma."""
    texts = [p.text for p in seg.paragraphs]
    excl = _mean(t.count("!") for t in texts)
    hashes = _mean(t.count("#") for t in texts)
    apos = _mean(t.count("'") for t in texts)
    oxford = _mean(len(_OXFORD_RE.findall(t)) for t in texts)
    return (excl, hashes, apos, oxford)


_FULL_MONTHS = (
    "January", "February", "March", "April", "May", "June", "July",
    "August", "September", "October", "November", "December",
)
_ABBREVIATABLE_FULL = frozenset(
    {"January", "February", "August", "September", "October", "November", "December"}
)
_AP_ABBREVS = frozenset({"Jan.", "Feb.", "Aug.", "Sept.", "Oct.", "Nov.", "Dec."})

_MONTH_ALT = "|".join(
    list(_FULL_MONTHS)
    + ["Sept\\.?"]
    + [f"{m}\\.?" for m in ("Jan", "Feb", "Mar", "Apr", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")]
)
_DATE_RE = re.compile(
    r"\b(?P<month>" + _MONTH_ALT + r")(?![A-Za-z])"
    r"(?:(?P<c1>\s*,)?\s+(?P<day>\d{1,2})(?!\d))?"
    r"(?:(?P<c2>\s*,)?\s+(?P<year>\d{4})(?!\d))?"
)

_TIME_WORDS = "one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve"
_TIME_RE = re.compile(
    r"\b(?:\d{1,2}(?::\d{2})?|(?P<word>" + _TIME_WORDS + r"))"
    r"\s*(?P<mer>[AaPp]\.?[Mm]\.?)(?![A-Za-z])",
    re.IGNORECASE,
)

_NUMERAL_RE = re.compile(r"(?<![\w.,:/-])\d+(?:[.,:/-]\d+)*(?!\w)")
_SPELLED_10PLUS_RE = re.compile(
    r"\b(?:ten|eleven|twelve|thirteen|fourteen|fifteen|sixteen|seventeen|eighteen|nineteen"
    r"|twenty|thirty|forty|fifty|sixty|seventy|eighty|ninety"
    r"|hundred|thousand|million|billion|trillion)\b",
    re.IGNORECASE,
)


def _date_matches(text: str):
    return [m for m in _DATE_RE.finditer(text)]


def _date_violates(m: re.Match) -> bool:
    month = m.group("month")
    is_full = month in _FULL_MONTHS
    if m.group("day"):
        if is_full:
            return month in _ABBREVIATABLE_FULL
        return month not in _AP_ABBREVS
    if m.group("year"):
        return (not is_full) or m.group("c2") is not None
    return False


def count_date_violations(text: str) -> int:
    return sum(1 for m in _date_matches(text) if _date_violates(m))


def count_time_violations(text: str) -> int:
    count = 0
    for m in _TIME_RE.finditer(text):
        if m.group("word") is not None or m.group("mer") not in ("a.m.", "p.m."):
            count += 1
    return count


def count_number_violations(text: str) -> int:
    spans = [m.span() for m in _date_matches(text)] + [m.span() for m in _TIME_RE.finditer(text)]

    def exempt(lo: int, hi: int) -> bool:
        return any(lo >= s and hi <= e for s, e in spans)

    count = 0
    for m in _NUMERAL_RE.finditer(text):
        token = m.group(0)
        if token.isdigit() and int(token) <= 9 and not exempt(*m.span()):
            count += 1
    for m in _SPELLED_10PLUS_RE.finditer(text):
        if not exempt(*m.span()):
            count += 1
    return count


def normalize_features(raw: np.ndarray | FeatureVector) -> FeatureVector:
    """Divide by the Euclidean norm; the zero vector maps to itself.

    Norms within 1e-12 of 1 are treated as exactly 1, which makes
    normalization exactly idempotent despite floating-point roundoff.
    """
    values = raw.values if isinstance(raw, FeatureVector) else np.asarray(raw, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (N_FEATURES,):
        raise ValueError(f"expected {N_FEATURES} feature values, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise NumericError("feature vector contains non-finite values")
    norm = float(np.linalg.norm(values))
    if norm == 0.0:
        return FeatureVector(values=np.zeros(N_FEATURES), normalized=True)
    if abs(norm - 1.0) <= 1e-12:
        return FeatureVector(values=values.copy(), normalized=True)
    return FeatureVector(values=values / norm, normalized=True)


def extract_raw_features(article_text: str) -> np.ndarray:
    """All 13 raw feature values, in canonical order."""
    folded = fold_homoglyphs(article_text)
    seg = segment(folded)
    org = extract_organization_features(seg)
    punct = extract_punctuation_features(seg)
    fmt = (
        float(count_date_violations(folded)),
        float(count_time_violations(folded)),
        float(count_number_violations(folded)),
    )
    return np.array(org + punct + fmt, dtype=np.float64)


def extract_journalism_vector(article_text: str) -> FeatureVector:
    """fold -> segment -> 13 features -> L2 normalization."""
    return normalize_features(extract_raw_features(article_text))


def extract_feature_matrix(corpus: Corpus, normalized: bool = True) -> np.ndarray:
    """Feature rows for every article, in corpus order."""
    rows = np.empty((len(corpus), N_FEATURES), dtype=np.float64)
    for i, article in enumerate(corpus):
        raw = extract_raw_features(article.text)
        rows[i] = normalize_features(raw).values if normalized else raw
    return rows
