"""Adversarial perturbations and the pre/post-attack robustness protocol.

The Cyrillic injection maps the lowercase Latin vowels a, e, o to their
Cyrillic lookalikes; the paraphrase attack substitutes externally generated
texts. Both perturb every test article uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import Article, Corpus, load_paraphrases, restrict_paraphrases
from .errors import EmptyCorpus
from .jfeatures import extract_feature_matrix

DEFAULT_VOWEL_MAP = {"a": "а", "e": "е", "o": "о"}

ATTACK_KINDS = ("cyrillic", "paraphrase_file")


@dataclass
class AttackSpec:
    kind: str
    paraphrase_path: str | None = None
    vowel_map: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_VOWEL_MAP))

    def __post_init__(self):
        if self.kind not in ATTACK_KINDS:
            raise ValueError(f"unknown attack kind {self.kind!r}")
        if self.kind == "paraphrase_file" and not self.paraphrase_path:
            raise ValueError("paraphrase_file attack requires paraphrase_path")


@dataclass
class RobustnessReport:
    detector: str
    generator: str
    attack: str
    auroc_pre: float
    auroc_post: float
    delta: float


def cyrillic_inject(text: str, vowel_map: dict[str, str] | None = None) -> str:
    """Replace mapped characters one for one; the codepoint count never changes."""
    table = str.maketrans(vowel_map or DEFAULT_VOWEL_MAP)
    return text.translate(table)


def apply_paraphrase(corpus: Corpus, paraphrase_path: str) -> Corpus:
    """Substitute paraphrased texts by id; ids, labels and order are kept."""
    paraphrases = load_paraphrases(paraphrase_path)
    restrict_paraphrases(paraphrases, corpus)
    articles = [
        Article(id=a.id, text=paraphrases.get(a.id, a.text), label=a.label, generator=a.generator)
        for a in corpus
    ]
    return Corpus(name=corpus.name, articles=articles)


def attack_corpus(corpus: Corpus, spec: AttackSpec) -> Corpus:
    if spec.kind == "cyrillic":
        articles = [
            Article(id=a.id, text=cyrillic_inject(a.text, spec.vowel_map),
                    label=a.label, generator=a.generator)
            for a in corpus
        ]
        return Corpus(name=corpus.name, articles=articles)
    return apply_paraphrase(corpus, spec.paraphrase_path)


def corpus_generator_tag(corpus: Corpus) -> str:
    tags = sorted({a.generator for a in corpus if a.label == 1 and a.generator})
    return "+".join(tags) if tags else "unknown"


def _score_corpus(detector, corpus: Corpus, features: np.ndarray,
                  embeddings: dict[str, np.ndarray] | None) -> np.ndarray:
    from .embeddings import lookup
    from .fusion import FusionModel, score_batch, score_lr_batch

    if isinstance(detector, FusionModel):
        if embeddings is None:
            raise ValueError("fusion detector needs embeddings")
        emb_matrix = np.stack([lookup(embeddings, a.id) for a in corpus])
        return score_batch(detector, emb_matrix, features)
    return score_lr_batch(detector, features)


def robustness_eval(detector, test_corpus: Corpus,
                    embeddings_pre: dict[str, np.ndarray] | None,
                    embeddings_post: dict[str, np.ndarray] | None,
                    spec: AttackSpec) -> RobustnessReport:
    """Score the clean and the attacked corpus, AUROC each, delta = pre - post."""
    from .evaluation import auroc
    from .fusion import FusionModel

    if len(test_corpus) == 0:
        raise EmptyCorpus("robustness evaluation needs a nonempty corpus")
    attacked = attack_corpus(test_corpus, spec)
    labels = test_corpus.labels()

    features_pre = extract_feature_matrix(test_corpus)
    features_post = extract_feature_matrix(attacked)
    scores_pre = _score_corpus(detector, test_corpus, features_pre, embeddings_pre)
    scores_post = _score_corpus(detector, attacked, features_post, embeddings_post)

    auroc_pre = auroc(scores_pre, labels)
    auroc_post = auroc(scores_post, labels)
    return RobustnessReport(
        detector="fusion" if isinstance(detector, FusionModel) else "lr+jf",
        generator=corpus_generator_tag(test_corpus),
        attack=spec.kind,
        auroc_pre=auroc_pre,
        auroc_post=auroc_post,
        delta=auroc_pre - auroc_post,
    )
