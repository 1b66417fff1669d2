"""Metrics and reporting: rank-based AUROC, permutation feature importance
(the substitute for SHAP-style attribution; not SHAP), and report emission.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, is_dataclass

import numpy as np

from .errors import ReportError, SingleClassError
from .jfeatures import FEATURE_NAMES


def auroc(scores, labels) -> float:
    """Mann-Whitney AUROC with midrank tie handling: the probability that a
    random positive outscores a random negative, ties counting one half."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.shape != y.shape or s.ndim != 1:
        raise ValueError("scores and labels must be aligned 1-D sequences")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("AUROC needs at least one positive and one negative")

    order = np.argsort(s, kind="mergesort")
    sorted_s = s[order]
    starts = np.flatnonzero(np.r_[True, np.diff(sorted_s) != 0])
    ends = np.r_[starts[1:], len(sorted_s)]
    midranks = (starts + ends + 1) / 2.0  # 1-based average rank per tie group
    ranks = np.empty(len(s))
    ranks[order] = np.repeat(midranks, ends - starts)
    rank_sum_pos = float(ranks[y == 1].sum())
    return (rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def _feature_scorer(model, embeddings: np.ndarray | None):
    from .fusion import FusionModel, LRModel, score_batch, score_lr_batch

    if isinstance(model, LRModel):
        return lambda x: score_lr_batch(model, x)
    if isinstance(model, FusionModel):
        if embeddings is None:
            raise ValueError("fusion model importance needs the embedding matrix")
        return lambda x: score_batch(model, embeddings, x)
    if callable(model):
        return model
    raise TypeError(f"unsupported model type {type(model).__name__}")


def permutation_importance(model, features: np.ndarray, labels, *, seed: int,
                           repeats: int = 10, embeddings: np.ndarray | None = None,
                           feature_names=FEATURE_NAMES) -> list[tuple[str, float]]:
    """Per-feature mean AUROC drop under seeded column shuffles, sorted
    descending with ties broken by canonical feature order."""
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    score = _feature_scorer(model, embeddings)
    baseline = auroc(score(x), y)
    drops = []
    for f_idx in range(x.shape[1]):
        total = 0.0
        for r in range(repeats):
            rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, f_idx, r))))
            shuffled = x.copy()
            shuffled[:, f_idx] = x[rng.permutation(x.shape[0]), f_idx]
            total += baseline - auroc(score(shuffled), y)
        drops.append(total / repeats)
    ranked = sorted(range(x.shape[1]), key=lambda i: (-drops[i], i))
    return [(feature_names[i], drops[i]) for i in ranked]


@dataclass
class EvalReport:
    detector: str
    generator: str
    auroc: float
    n_test: int
    config_digest: str


def config_digest(cfg, corpus_name: str) -> str:
    payload = {"corpus": corpus_name, "config": asdict(cfg) if is_dataclass(cfg) else cfg}
    blob = json.dumps(payload, sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:12]


_COLUMN_ORDER = (
    "detector", "generator", "attack", "auroc", "n_test",
    "auroc_pre", "auroc_post", "delta", "config_digest",
)


def _as_row(report) -> dict:
    if is_dataclass(report) and not isinstance(report, type):
        return asdict(report)
    if isinstance(report, dict):
        return dict(report)
    raise TypeError(f"unsupported report type {type(report).__name__}")


def _format_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def render_table(rows: list[dict]) -> str:
    columns = [c for c in _COLUMN_ORDER if any(c in r for r in rows)]
    cells = [[_format_cell(r[c]) if c in r else "-" for c in columns] for r in rows]
    widths = [max(len(col), max(len(row[i]) for row in cells)) for i, col in enumerate(columns)]
    header = "  ".join(col.ljust(w) for col, w in zip(columns, widths))
    lines = [header, "  ".join("-" * w for w in widths)]
    for row in cells:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


def emit_report(reports: list, json_path: str | os.PathLike,
                table_path: str | os.PathLike | None = None) -> None:
    """Write the report list as a JSON document plus an aligned text table."""
    if not reports:
        raise ReportError("nothing to report")
    rows = [_as_row(r) for r in reports]
    with open(json_path, "w", encoding="utf-8") as f:
        json.dump({"reports": rows}, f, indent=2)
        f.write("\n")
    if table_path is None:
        table_path = os.fspath(json_path) + ".txt"
    with open(table_path, "w", encoding="utf-8") as f:
        f.write(render_table(rows))
