"""Sequence-level encoder embeddings for a corpus, written as JGEMB1.

The document representation is the encoder's first-position hidden state
(the classification token for BERT/RoBERTa-style models); encoders without
a dedicated sequence token fall back to the same first-position pooling,
which is the documented behavior rather than a claim of equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpusio import read_corpus
from .wire import write_embeddings


@dataclass
class EmbedJob:
    corpus_path: str
    output_path: str
    model_id: str = "roberta-base"
    max_length: int = 512
    batch_size: int = 8


class EncoderLoadError(RuntimeError):
    pass


def _load_encoder(model_id: str):
    try:
        from transformers import AutoModel, AutoTokenizer

        tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = AutoModel.from_pretrained(model_id)
    except Exception as e:
        raise EncoderLoadError(f"could not load encoder {model_id!r}: {e}") from e
    return model, tokenizer


def embed_corpus(job: EmbedJob, model=None, tokenizer=None) -> tuple[int, int]:
    """Embed every article in corpus order and write the JGEMB1 file.

    Inference runs in evaluation mode under no_grad and is deterministic;
    inputs longer than ``job.max_length`` tokens are truncated, never
    rejected. Pass ``model``/``tokenizer`` to reuse loaded instances (the
    tests inject tiny local models); otherwise ``job.model_id`` is loaded.
    Returns (record count, dimension).
    """
    import torch

    if model is None or tokenizer is None:
        model, tokenizer = _load_encoder(job.model_id)
    model.eval()

    records = read_corpus(job.corpus_path)
    ids = [r["id"] for r in records]
    rows = []
    with torch.no_grad():
        for lo in range(0, len(records), job.batch_size):
            batch = [r["text"] for r in records[lo:lo + job.batch_size]]
            enc = tokenizer(batch, truncation=True, max_length=job.max_length,
                            padding=True, return_tensors="pt")
            hidden = model(**enc).last_hidden_state
            rows.append(hidden[:, 0, :].to(torch.float32).cpu().numpy())
    matrix = np.concatenate(rows, axis=0) if rows else np.empty((0, _hidden_size(model)))
    write_embeddings(job.output_path, ids, matrix)
    return len(ids), int(matrix.shape[1])


def _hidden_size(model) -> int:
    return int(model.config.hidden_size)
