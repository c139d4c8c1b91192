"""Command-line entry point: texts JSONL in, embedding archive out."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import HfEmbedError
from .extract import (
    KNOWN_MODELS,
    STATIC_MODES,
    ExtractionSpec,
    extract,
    read_texts_jsonl,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hfembed",
        description="Write layered hidden states of a pretrained model "
        "as an embedding archive.",
    )
    parser.add_argument("--model", required=True, choices=KNOWN_MODELS)
    parser.add_argument(
        "--texts", required=True, help="JSON lines file of {id, text} objects"
    )
    parser.add_argument("--out", required=True, help="archive directory")
    parser.add_argument("--static-mode", choices=STATIC_MODES, default="raw")
    parser.add_argument("--revision", default="main", help="checkpoint revision")
    parser.add_argument(
        "--model-path",
        default=None,
        help="load the checkpoint from this local directory instead of the hub",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        texts = read_texts_jsonl(args.texts)
        spec = ExtractionSpec(
            model_name=args.model,
            texts=tuple(texts),
            out=Path(args.out),
            static_mode=args.static_mode,
            revision=args.revision,
            model_path=args.model_path,
        )
        extract(spec)
    except HfEmbedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"extract: {len(texts)} sentences -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
