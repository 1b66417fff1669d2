"""Journalism-style-guided detection of AI-generated news.

The package extracts 13 style features derived from news-writing standards
(sentence/paragraph organization, punctuation habits, date/time/number
formatting), fuses them with encoder embeddings through a small guidance
network, and evaluates detection AUROC and robustness under character- and
word-level attacks.
"""

from .corpus import Article, Corpus, SplitSpec, load_corpus, split_corpus, write_corpus
from .jfeatures import (
    FEATURE_NAMES,
    FeatureVector,
    extract_feature_matrix,
    extract_journalism_vector,
    extract_raw_features,
    normalize_features,
)
from .segment import SegmentedArticle, fold_homoglyphs, segment

__version__ = "0.1.0"

__all__ = [
    "Article",
    "Corpus",
    "SplitSpec",
    "load_corpus",
    "split_corpus",
    "write_corpus",
    "FEATURE_NAMES",
    "FeatureVector",
    "extract_feature_matrix",
    "extract_journalism_vector",
    "extract_raw_features",
    "normalize_features",
    "SegmentedArticle",
    "fold_homoglyphs",
    "segment",
    "__version__",
]
