import json

import pytest
import torch
from tokenizers import Tokenizer, models, pre_tokenizers
from transformers import (
    PreTrainedTokenizerFast,
    RobertaConfig,
    RobertaModel,
    T5Config,
    T5ForConditionalGeneration,
)

_WORDS = [
    "the", "cat", "sat", "on", "mat", "dog", "ran", "fast", "news", "city",
    "council", "opens", "plan", "storm", "hit", "coast", "late", "night",
]


def _tiny_tokenizer() -> PreTrainedTokenizerFast:
    vocab = {"<pad>": 0, "<s>": 1, "</s>": 2, "<unk>": 3}
    for w in _WORDS:
        vocab[w] = len(vocab)
    tok = Tokenizer(models.WordLevel(vocab, unk_token="<unk>"))
    tok.pre_tokenizer = pre_tokenizers.Whitespace()
    return PreTrainedTokenizerFast(
        tokenizer_object=tok, pad_token="<pad>", unk_token="<unk>",
        bos_token="<s>", eos_token="</s>", cls_token="<s>", sep_token="</s>",
    )


@pytest.fixture(scope="session")
def tiny_encoder():
    torch.manual_seed(0)
    config = RobertaConfig(
        vocab_size=22, hidden_size=16, num_hidden_layers=1, num_attention_heads=2,
        intermediate_size=32, max_position_embeddings=40, pad_token_id=0,
    )
    model = RobertaModel(config)
    model.eval()
    return model, _tiny_tokenizer()


@pytest.fixture(scope="session")
def tiny_seq2seq():
    torch.manual_seed(1)
    config = T5Config(
        vocab_size=22, d_model=16, d_kv=4, d_ff=32, num_layers=1, num_heads=2,
        decoder_start_token_id=0, pad_token_id=0, eos_token_id=2,
    )
    model = T5ForConditionalGeneration(config)
    model.eval()
    return model, _tiny_tokenizer()


@pytest.fixture
def corpus_file(tmp_path):
    path = tmp_path / "corpus.jsonl"
    rows = [
        {"id": "a1", "text": "the cat sat on the mat", "label": 0},
        {"id": "a2", "text": "dog ran fast in the city", "label": 1, "generator": "gpt3"},
        {"id": "a3", "text": "storm hit the coast late at night", "label": 1,
         "generator": "gpt3"},
    ]
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    return path


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and rep.when == "call":
        status = "PASS" if rep.passed else "FAIL"
        print(f"\n[acceptance] {marker.args[0]}: {status}")
