"""Sequence-to-sequence paraphrasing of a corpus into the paraphrase file
format (JSON lines of id and text, ids preserved from the input corpus).

Generation hyperparameters are plain configuration with no fidelity claim;
decoding is deterministic (beam search, no sampling).
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpusio import read_corpus, write_jsonl


@dataclass
class ParaphraseParams:
    num_beams: int = 4
    max_new_tokens: int = 256
    prompt_prefix: str = "paraphrase: "


def _load_seq2seq(model_id: str):
    from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

    return AutoModelForSeq2SeqLM.from_pretrained(model_id), AutoTokenizer.from_pretrained(model_id)


def paraphrase_corpus(corpus_path: str, output_path: str, model_id: str = "t5-base",
                      params: ParaphraseParams | None = None,
                      model=None, tokenizer=None) -> int:
    """Write one paraphrase per article, in corpus order. Returns the count."""
    import torch

    params = params or ParaphraseParams()
    if model is None or tokenizer is None:
        model, tokenizer = _load_seq2seq(model_id)
    model.eval()

    records = read_corpus(corpus_path)
    out = []
    with torch.no_grad():
        for rec in records:
            enc = tokenizer(params.prompt_prefix + rec["text"], truncation=True,
                            max_length=512, return_tensors="pt")
            generated = model.generate(
                enc["input_ids"],
                attention_mask=enc.get("attention_mask"),
                num_beams=params.num_beams,
                max_new_tokens=params.max_new_tokens,
                do_sample=False,
            )
            text = tokenizer.decode(generated[0], skip_special_tokens=True)
            out.append({"id": rec["id"], "text": text})
    write_jsonl(out, output_path)
    return len(out)
