"""Labeled news corpora: JSON-lines loading, seeded splitting, persistence.

Corpus file format: UTF-8 JSON lines, one object per line with fields
``id`` (string), ``text`` (string), ``label`` (0 or 1) and an optional
``generator`` (string). Paraphrase files carry ``id`` and ``text`` only.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DuplicateId, EmptyCorpus, MalformedRecord, UnknownId

HUMAN = 0
AI = 1


@dataclass(frozen=True)
class Article:
    id: str
    text: str
    label: int
    generator: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("article id must be nonempty")
        if self.label not in (HUMAN, AI):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")


@dataclass
class Corpus:
    name: str
    articles: list[Article] = field(default_factory=list)

    def __post_init__(self):
        ids = [a.id for a in self.articles]
        if len(ids) != len(set(ids)):
            seen = set()
            for i in ids:
                if i in seen:
                    raise DuplicateId(i)
                seen.add(i)

    def __len__(self) -> int:
        return len(self.articles)

    def __iter__(self):
        return iter(self.articles)

    def ids(self) -> list[str]:
        return [a.id for a in self.articles]

    def labels(self) -> np.ndarray:
        return np.array([a.label for a in self.articles], dtype=np.int64)


@dataclass(frozen=True)
class SplitSpec:
    train_ratio: float = 0.7
    test_ratio: float = 0.2
    val_ratio: float = 0.1
    seed: int = 42

    def __post_init__(self):
        ratios = (self.train_ratio, self.test_ratio, self.val_ratio)
        if any(r <= 0 for r in ratios):
            raise ValueError("split ratios must be positive")
        if abs(sum(ratios) - 1.0) > 1e-9:
            raise ValueError(f"split ratios must sum to 1, got {sum(ratios)}")
        if self.seed < 0:
            raise ValueError("seed must be unsigned")


def _parse_record(line: str, line_no: int) -> Article:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise MalformedRecord(line_no, f"invalid JSON ({e.msg})") from e
    if not isinstance(obj, dict):
        raise MalformedRecord(line_no, "record is not a JSON object")
    for key in ("id", "text", "label"):
        if key not in obj:
            raise MalformedRecord(line_no, f"missing required field {key!r}")
    if not isinstance(obj["id"], str) or not obj["id"]:
        raise MalformedRecord(line_no, "field 'id' must be a nonempty string")
    if not isinstance(obj["text"], str):
        raise MalformedRecord(line_no, "field 'text' must be a string")
    if obj["label"] not in (0, 1):
        raise MalformedRecord(line_no, "field 'label' must be 0 or 1")
    gen = obj.get("generator")
    if gen is not None and not isinstance(gen, str):
        raise MalformedRecord(line_no, "field 'generator' must be a string")
    return Article(id=obj["id"], text=obj["text"], label=obj["label"], generator=gen)


def load_corpus(path: str | os.PathLike) -> Corpus:
    """Read a JSON-lines corpus, one Article per nonempty line, order preserved."""
    articles = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            art = _parse_record(line, line_no)
            if art.id in seen:
                raise DuplicateId(art.id)
            seen.add(art.id)
            articles.append(art)
    name = os.path.splitext(os.path.basename(os.fspath(path)))[0]
    return Corpus(name=name, articles=articles)


def write_corpus(corpus: Corpus, path: str | os.PathLike) -> None:
    """Write JSON lines such that load_corpus(write_corpus(c)) round-trips exactly."""
    with open(path, "w", encoding="utf-8") as f:
        for a in corpus.articles:
            rec = {"id": a.id, "text": a.text, "label": a.label}
            if a.generator is not None:
                rec["generator"] = a.generator
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")


def split_corpus(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus, Corpus]:
    """Disjoint train/test/val partition.

    Sizes are floor(n * ratio) with the flooring remainder assigned to train.
    The shuffle is a Fisher-Yates permutation drawn from numpy's PCG64 stream
    seeded with ``spec.seed``, so identical (corpus, seed) pairs always produce
    identical partitions.
    """
    n = len(corpus)
    if n == 0:
        raise EmptyCorpus("cannot split an empty corpus")
    n_test = math.floor(n * spec.test_ratio)
    n_val = math.floor(n * spec.val_ratio)
    n_train = math.floor(n * spec.train_ratio)
    n_train += n - (n_train + n_test + n_val)

    rng = np.random.Generator(np.random.PCG64(spec.seed))
    perm = rng.permutation(n)
    pick = lambda idx: [corpus.articles[i] for i in idx]
    train = Corpus(name=f"{corpus.name}-train", articles=pick(perm[:n_train]))
    test = Corpus(name=f"{corpus.name}-test", articles=pick(perm[n_train:n_train + n_test]))
    val = Corpus(name=f"{corpus.name}-val", articles=pick(perm[n_train + n_test:]))
    return train, test, val


def load_paraphrases(path: str | os.PathLike) -> dict[str, str]:
    """Read a paraphrase file ({id, text} JSON lines) into an id -> text map."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedRecord(line_no, f"invalid JSON ({e.msg})") from e
            if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
                raise MalformedRecord(line_no, "paraphrase record needs 'id' and 'text'")
            if obj["id"] in out:
                raise DuplicateId(obj["id"])
            out[obj["id"]] = obj["text"]
    return out


def restrict_paraphrases(paraphrases: dict[str, str], corpus: Corpus) -> None:
    """Raise UnknownId unless paraphrase ids are a subset of the corpus ids."""
    known = set(corpus.ids())
    alien = [i for i in paraphrases if i not in known]
    if alien:
        raise UnknownId(f"paraphrase ids not present in corpus: {sorted(alien)[:5]}")
