"""Command-line entry point.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.
Errors print a single machine-parsable line to stderr. All randomness flows
from --seed, so identical invocations on identical files produce
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

import numpy as np

from . import embeddings as emb_io
from .attack import AttackSpec, attack_corpus, corpus_generator_tag, robustness_eval
from .corpus import Corpus, SplitSpec, load_corpus, split_corpus, write_corpus
from .errors import DataError, NumericError
from .evaluation import EvalReport, auroc, config_digest, emit_report
from .fusion import (
    FusionModel,
    TrainConfig,
    init_model,
    load_model,
    save_model,
    score_batch,
    score_lr_batch,
    train_fusion,
    train_lr,
)
from .jfeatures import FEATURE_NAMES, N_FEATURES, extract_feature_matrix


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="seed for all randomness (default 42)")

    parser = _Parser(prog="jguard", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", parents=[common], help="split a corpus into train/test/val")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--train-ratio", type=float, default=0.7)
    p.add_argument("--test-ratio", type=float, default=0.2)
    p.add_argument("--val-ratio", type=float, default=0.1)

    p = sub.add_parser("extract", parents=[common], help="write the journalism feature CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--raw", action="store_true", help="raw values instead of normalized")

    p = sub.add_parser("train-lr", parents=[common], help="train the logistic-regression baseline")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=300)
    p.add_argument("--batch-size", type=int, default=0, help="0 = full batch")
    p.add_argument("--l2", type=float, default=0.0)

    p = sub.add_parser("train-fusion", parents=[common], help="train the fusion detector heads")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--val", required=True)
    p.add_argument("--out", required=True)
    _add_embedding_flags(p)
    p.add_argument("--h1", type=int, default=1024)
    p.add_argument("--latent", type=int, default=256)
    p.add_argument("--h2", type=int, default=32)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--patience", type=int, default=5)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--dropout", type=float, default=0.2)

    p = sub.add_parser("eval", parents=[common], help="score a test corpus and report AUROC")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    _add_embedding_flags(p)

    p = sub.add_parser("attack", parents=[common], help="write a perturbed copy of a corpus")
    p.add_argument("--kind", choices=("cyrillic", "paraphrase_file"), required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--paraphrase-file")

    p = sub.add_parser("robustness", parents=[common],
                       help="pre/post-attack AUROC delta for a detector")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kind", choices=("cyrillic", "paraphrase_file"), required=True)
    p.add_argument("--paraphrase-file")
    _add_embedding_flags(p)
    p.add_argument("--embeddings-post", help="embedding file for the attacked corpus")

    p = sub.add_parser("report", parents=[common], help="merge report JSONs into one table")
    p.add_argument("--in", dest="inputs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--table", help="table path (default: <out>.txt)")

    return parser


def _add_embedding_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--embeddings", help="JGEMB1 embedding file")
    p.add_argument("--pseudo-embeddings", action="store_true",
                   help="derive deterministic stand-in embeddings from article ids")
    p.add_argument("--dim", type=int, help="pseudo-embedding dimension")


def _embedding_maps(args, corpus: Corpus, seed: int, need: bool,
                    tag: str = "") -> dict[str, np.ndarray] | None:
    if getattr(args, "embeddings", None):
        ids, matrix = emb_io.load_embeddings(args.embeddings)
        return emb_io.embedding_map(ids, matrix)
    if getattr(args, "pseudo_embeddings", False):
        if not args.dim:
            raise UsageError("--pseudo-embeddings requires --dim")
        return emb_io.pseudo_embedding_map(corpus.ids(), args.dim, seed, tag)
    if need:
        raise UsageError("this model needs --embeddings <path> or --pseudo-embeddings --dim <d>")
    return None


def _emb_matrix(emb_map: dict[str, np.ndarray], corpus: Corpus) -> np.ndarray:
    return np.stack([emb_io.lookup(emb_map, a.id) for a in corpus])


def _cmd_split(args) -> int:
    corpus = load_corpus(args.input)
    spec = SplitSpec(args.train_ratio, args.test_ratio, args.val_ratio, args.seed)
    train, test, val = split_corpus(corpus, spec)
    os.makedirs(args.out_dir, exist_ok=True)
    for name, part in (("train", train), ("test", test), ("val", val)):
        write_corpus(part, os.path.join(args.out_dir, f"{name}.jsonl"))
    print(f"split: train={len(train)} test={len(test)} val={len(val)}")
    return 0


def _cmd_extract(args) -> int:
    corpus = load_corpus(args.input)
    matrix = extract_feature_matrix(corpus, normalized=not args.raw)
    with open(args.out, "w", encoding="utf-8", newline="") as f:
        f.write("id,label," + ",".join(FEATURE_NAMES) + "\n")
        for article, row in zip(corpus, matrix):
            values = ",".join(f"{v:.9g}" for v in row)
            f.write(f"{article.id},{article.label},{values}\n")
    print(f"extract: {len(corpus)} articles -> {args.out}")
    return 0


def _cmd_train_lr(args) -> int:
    corpus = load_corpus(args.input)
    cfg = TrainConfig(learning_rate=args.lr, dropout_rate=0.0, max_epochs=args.epochs,
                      batch_size=args.batch_size, seed=args.seed, l2=args.l2)
    model = train_lr(extract_feature_matrix(corpus), corpus.labels(), cfg)
    save_model(model, args.out)
    print(f"train-lr: {len(corpus)} articles -> {args.out}")
    return 0


def _cmd_train_fusion(args) -> int:
    train_c = load_corpus(args.input)
    val_c = load_corpus(args.val)
    emb_map = _embedding_maps(args, Corpus("all", train_c.articles + val_c.articles),
                              args.seed, need=True)
    d = next(iter(emb_map.values())).shape[0]
    model = init_model(d, N_FEATURES, args.seed, h1=args.h1, l=args.latent, h2=args.h2,
                       dropout_rate=args.dropout)
    cfg = TrainConfig(learning_rate=args.lr, dropout_rate=args.dropout, max_epochs=args.epochs,
                      patience=args.patience, batch_size=args.batch_size, seed=args.seed)
    train_set = (_emb_matrix(emb_map, train_c), extract_feature_matrix(train_c), train_c.labels())
    val_set = (_emb_matrix(emb_map, val_c), extract_feature_matrix(val_c), val_c.labels())
    model = train_fusion(model, train_set, val_set, cfg)
    save_model(model, args.out)
    print(f"train-fusion: {len(train_c)} train / {len(val_c)} val articles -> {args.out}")
    return 0


def _score_for_model(model, args, corpus: Corpus, seed: int, tag: str = "") -> np.ndarray:
    features = extract_feature_matrix(corpus)
    if isinstance(model, FusionModel):
        emb_map = _embedding_maps(args, corpus, seed, need=True, tag=tag)
        return score_batch(model, _emb_matrix(emb_map, corpus), features)
    return score_lr_batch(model, features)


def _cmd_eval(args) -> int:
    model = load_model(args.model)
    corpus = load_corpus(args.input)
    scores = _score_for_model(model, args, corpus, args.seed)
    value = auroc(scores, corpus.labels())
    detector = "fusion" if isinstance(model, FusionModel) else "lr+jf"
    report = EvalReport(
        detector=detector,
        generator=corpus_generator_tag(corpus),
        auroc=value,
        n_test=len(corpus),
        config_digest=config_digest({"seed": args.seed, "model": detector}, corpus.name),
    )
    with open(args.out, "w", encoding="utf-8") as f:
        json.dump(asdict(report), f, indent=2)
        f.write("\n")
    print(f"eval: auroc={value:.6f} detector={detector} n={len(corpus)} -> {args.out}")
    return 0


def _cmd_attack(args) -> int:
    corpus = load_corpus(args.input)
    spec = AttackSpec(kind=args.kind, paraphrase_path=args.paraphrase_file)
    write_corpus(attack_corpus(corpus, spec), args.out)
    print(f"attack: {args.kind} on {len(corpus)} articles -> {args.out}")
    return 0


def _cmd_robustness(args) -> int:
    model = load_model(args.model)
    corpus = load_corpus(args.input)
    spec = AttackSpec(kind=args.kind, paraphrase_path=args.paraphrase_file)
    if isinstance(model, FusionModel):
        pre = _embedding_maps(args, corpus, args.seed, need=True, tag="")
        if args.embeddings_post:
            ids, matrix = emb_io.load_embeddings(args.embeddings_post)
            post = emb_io.embedding_map(ids, matrix)
        elif args.pseudo_embeddings:
            post = emb_io.pseudo_embedding_map(corpus.ids(), args.dim, args.seed, "post")
        else:
            raise UsageError("fusion robustness needs --embeddings-post or --pseudo-embeddings")
    else:
        pre = post = None
    report = robustness_eval(model, corpus, pre, post, spec)
    with open(args.out, "w", encoding="utf-8") as f:
        json.dump(asdict(report), f, indent=2)
        f.write("\n")
    print(f"robustness: {report.attack} delta={report.delta:.6f} detector={report.detector} "
          f"-> {args.out}")
    return 0


def _cmd_report(args) -> int:
    rows = []
    for path in args.inputs:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
        if isinstance(doc, dict) and "reports" in doc:
            rows.extend(doc["reports"])
        elif isinstance(doc, dict):
            rows.append(doc)
        else:
            raise DataError(f"{path}: expected a report object or a reports document")
    emit_report(rows, args.out, args.table)
    print(f"report: {len(rows)} rows -> {args.out}")
    return 0


_COMMANDS = {
    "split": _cmd_split,
    "extract": _cmd_extract,
    "train-lr": _cmd_train_lr,
    "train-fusion": _cmd_train_fusion,
    "eval": _cmd_eval,
    "attack": _cmd_attack,
    "robustness": _cmd_robustness,
    "report": _cmd_report,
}


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as e:
        print(f"error: usage: {e}", file=sys.stderr)
        return 2
    except NumericError as e:
        print(f"error: numeric: {e}", file=sys.stderr)
        return 4
    except (DataError, OSError, ValueError) as e:
        print(f"error: data: {e}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
