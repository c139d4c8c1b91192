"""Writer for the shared embedding-archive directory format.

An archive is a directory holding manifest.json plus one raw binary file
per sentence: little-endian float32, C row-major, shape [L+2][m][d] with
layer order [static, 0, 1, ..., L], no header. Subword spans are half-open
byte offsets into the UTF-8 encoding of the sentence text. The layout is
shared with the probing pipeline that consumes these archives; only this
module needs to agree with it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

FORMAT_VERSION = 1

Span = tuple[int, int]


@dataclass
class ExtractedSentence:
    id: str
    text: str
    subword_spans: list[Span]
    data: np.ndarray  # float32 [num_hidden_layers + 2][num_subwords][dim]

    @property
    def num_subwords(self) -> int:
        return len(self.subword_spans)


def layer_names(num_hidden_layers: int) -> list[str]:
    return ["static"] + [str(i) for i in range(num_hidden_layers + 1)]


def write_archive(
    path: str | Path,
    model_name: str,
    num_hidden_layers: int,
    dim: int,
    sentences: Sequence[ExtractedSentence],
    pooling: str = "mean",
) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    num_layers = num_hidden_layers + 2
    entries = []
    for i, s in enumerate(sentences):
        expected = (num_layers, s.num_subwords, dim)
        if s.data.shape != expected:
            raise ValueError(f"sentence {s.id}: data shape {s.data.shape} != {expected}")
        data_file = f"{i:06d}.bin"
        (path / data_file).write_bytes(
            np.ascontiguousarray(s.data, dtype="<f4").tobytes()
        )
        entries.append(
            {
                "id": s.id,
                "text": s.text,
                "num_subwords": s.num_subwords,
                "subword_spans": [[a, b] for a, b in s.subword_spans],
                "data_file": data_file,
            }
        )
    manifest = {
        "format_version": FORMAT_VERSION,
        "model_name": model_name,
        "num_hidden_layers": num_hidden_layers,
        "dim": dim,
        "pooling": pooling,
        "layer_names": layer_names(num_hidden_layers),
        "sentences": entries,
    }
    (path / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
