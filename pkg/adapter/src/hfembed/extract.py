"""Layered hidden-state extraction from pretrained transformer checkpoints.

For each input sentence the archive records, per subword, the static
embedding-table vector (no position information; optionally passed through
the checkpoint's embedding-layer normalization), the embedding-layer
output (layer "0", which includes position embeddings), and every
transformer block's output ("1" .. "L"). Special markers such as [CLS] and
[SEP] are dropped, and subword spans are byte offsets into the UTF-8 text
with any leading whitespace trimmed off, so spans cover the word
characters exactly even for byte-level tokenizers that attach the
preceding space to a token.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import torch

from .archive import ExtractedSentence, Span, write_archive
from .errors import ExtractionError, InputFileError, ModelLoadError

KNOWN_MODELS = ("bert-base-uncased", "gpt2")
STATIC_MODES = ("raw", "normalized")


@dataclass(frozen=True)
class ExtractionSpec:
    model_name: str
    texts: tuple[tuple[str, str], ...]  # (sentence_id, text) pairs
    out: Path
    static_mode: str = "raw"
    revision: str = "main"
    model_path: str | None = None  # local checkout; defaults to model_name

    def __post_init__(self):
        if self.static_mode not in STATIC_MODES:
            raise ValueError(f"static_mode must be one of {STATIC_MODES}")


def read_texts_jsonl(path: str | Path) -> list[tuple[str, str]]:
    """Parse a JSON-lines file of {"id": ..., "text": ...} objects."""
    path = Path(path)
    if not path.exists():
        raise InputFileError(f"texts file not found: {path}")
    texts: list[tuple[str, str]] = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputFileError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
        if not isinstance(obj, dict) or "id" not in obj or "text" not in obj:
            raise InputFileError(f"{path}:{lineno}: expected an object with id and text")
        texts.append((str(obj["id"]), str(obj["text"])))
    return texts


def trim_leading_space(text: str, span: tuple[int, int]) -> tuple[int, int]:
    """Shrink a character span until it no longer starts on whitespace."""
    start, end = span
    while start < end and text[start].isspace():
        start += 1
    return start, end


def char_spans_to_byte_spans(
    sentence_id: str, text: str, spans: Sequence[tuple[int, int]]
) -> list[Span]:
    """Convert character offsets into byte offsets of the UTF-8 encoding."""
    byte_at = [0]
    for ch in text:
        byte_at.append(byte_at[-1] + len(ch.encode("utf-8")))
    out: list[Span] = []
    for start, end in spans:
        if not (0 <= start <= end <= len(text)):
            raise ExtractionError(
                f"sentence {sentence_id}: subword offsets ({start}, {end}) fall "
                f"outside the text of {len(text)} characters"
            )
        out.append((byte_at[start], byte_at[end]))
    return out


def _embedding_layernorm(model) -> torch.nn.Module | None:
    # BERT-style models normalize inside the embedding layer; GPT-2 does not
    embeddings = getattr(model, "embeddings", None)
    if embeddings is None:
        return None
    return getattr(embeddings, "LayerNorm", None)


def extract_sentences(
    model,
    tokenizer,
    texts: Sequence[tuple[str, str]],
    static_mode: str = "raw",
) -> tuple[int, int, list[ExtractedSentence]]:
    """Embed sentences; returns (num_hidden_layers, dim, sentences).

    One forward pass per sentence keeps results independent of batching
    and padding. Dropout is disabled (eval mode), so repeated runs are
    bit-identical.
    """
    if static_mode not in STATIC_MODES:
        raise ValueError(f"static_mode must be one of {STATIC_MODES}")
    model.eval()
    max_positions = getattr(model.config, "max_position_embeddings", None)
    layernorm = _embedding_layernorm(model) if static_mode == "normalized" else None
    sentences: list[ExtractedSentence] = []
    num_hidden_layers = dim = None
    for sentence_id, text in texts:
        enc = tokenizer(
            text,
            return_offsets_mapping=True,
            return_special_tokens_mask=True,
            add_special_tokens=True,
        )
        ids = enc["input_ids"]
        offsets = enc["offset_mapping"]
        special = enc["special_tokens_mask"]
        if max_positions is not None and len(ids) > max_positions:
            raise ExtractionError(
                f"sentence {sentence_id}: {len(ids)} subwords exceed the "
                f"model's {max_positions} positions"
            )
        keep: list[int] = []
        char_spans: list[tuple[int, int]] = []
        for j, (is_special, span) in enumerate(zip(special, offsets)):
            if is_special:
                continue
            start, end = trim_leading_space(text, tuple(span))
            if start >= end:
                continue  # whitespace-only piece carries no text
            keep.append(j)
            char_spans.append((start, end))
        if not keep:
            raise ExtractionError(f"sentence {sentence_id}: no content subwords")
        byte_spans = char_spans_to_byte_spans(sentence_id, text, char_spans)

        input_ids = torch.tensor([ids], dtype=torch.long)
        with torch.no_grad():
            out = model(input_ids=input_ids, output_hidden_states=True)
            static = model.get_input_embeddings()(input_ids)
            if layernorm is not None:
                static = layernorm(static)
        layers = torch.stack([static, *out.hidden_states], dim=0)  # [L+2, 1, seq, d]
        data = layers[:, 0, keep, :].to(torch.float32).numpy()
        num_hidden_layers = len(out.hidden_states) - 1
        dim = data.shape[-1]
        sentences.append(
            ExtractedSentence(
                id=sentence_id, text=text, subword_spans=byte_spans, data=data
            )
        )
    return num_hidden_layers, dim, sentences


def load_model(name_or_path: str, revision: str = "main"):
    """(model, fast tokenizer) for a checkpoint name or local directory."""
    from transformers import AutoModel, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(name_or_path, revision=revision)
        model = AutoModel.from_pretrained(name_or_path, revision=revision)
    except Exception as exc:
        raise ModelLoadError(f"could not load {name_or_path!r}: {exc}") from exc
    if not getattr(tokenizer, "is_fast", False):
        raise ModelLoadError(
            f"{name_or_path!r} has no fast tokenizer; offset mapping needs one"
        )
    return model.eval(), tokenizer


def model_label(spec: ExtractionSpec) -> str:
    return f"{spec.model_name} static_mode={spec.static_mode} revision={spec.revision}"


def extract(spec: ExtractionSpec) -> Path:
    """Run the full extraction described by spec; returns the archive path."""
    if not spec.texts:
        raise InputFileError("no sentences to extract")
    model, tokenizer = load_model(spec.model_path or spec.model_name, spec.revision)
    num_hidden_layers, dim, sentences = extract_sentences(
        model, tokenizer, spec.texts, spec.static_mode
    )
    write_archive(spec.out, model_label(spec), num_hidden_layers, dim, sentences)
    return Path(spec.out)
