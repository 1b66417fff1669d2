"""Sidecar command line: embed, paraphrase, generate."""

from __future__ import annotations

import argparse
import logging
import sys

from .embed import EmbedJob, embed_corpus
from .generate import ChatApiConfig, generate_to_file, read_headlines
from .paraphrase import ParaphraseParams, paraphrase_corpus


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jguard-sidecar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="write JGEMB1 embeddings for a corpus")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--model", default="roberta-base")
    p.add_argument("--max-length", type=int, default=512)
    p.add_argument("--batch-size", type=int, default=8)

    p = sub.add_parser("paraphrase", help="write a paraphrase file for a corpus")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--model", default="t5-base")
    p.add_argument("--beams", type=int, default=4)
    p.add_argument("--max-new-tokens", type=int, default=256)

    p = sub.add_parser("generate", help="generate an AI news corpus from headlines")
    p.add_argument("--headlines", required=True, help="text file, one headline per line")
    p.add_argument("--out", required=True)
    p.add_argument("--model", default="gpt-3.5-turbo")
    p.add_argument("--base-url", default="https://api.openai.com/v1")
    p.add_argument("--min-interval", type=float, default=0.0)

    return parser


def main() -> None:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = _build_parser().parse_args()
    if args.command == "embed":
        job = EmbedJob(corpus_path=args.input, output_path=args.out,
                       model_id=args.model, max_length=args.max_length,
                       batch_size=args.batch_size)
        count, dim = embed_corpus(job)
        print(f"embed: {count} records, dim={dim} -> {args.out}")
    elif args.command == "paraphrase":
        params = ParaphraseParams(num_beams=args.beams, max_new_tokens=args.max_new_tokens)
        count = paraphrase_corpus(args.input, args.out, model_id=args.model, params=params)
        print(f"paraphrase: {count} records -> {args.out}")
    elif args.command == "generate":
        config = ChatApiConfig(model=args.model, base_url=args.base_url,
                               min_interval=args.min_interval)
        count = generate_to_file(read_headlines(args.headlines), config, args.out)
        print(f"generate: {count} articles -> {args.out}")
    sys.exit(0)


if __name__ == "__main__":
    main()
