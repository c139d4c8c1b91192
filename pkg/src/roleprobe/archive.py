"""On-disk embedding archive: layered per-subword vectors with byte spans.

An archive is a directory holding manifest.json plus one raw binary file
per sentence: little-endian float32, C row-major, shape [L+2][m][d] with
layer order [static, 0, 1, ..., L], no header. Subword spans are byte
offsets into the sentence text, like token spans.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import AlignmentError, ArchiveVersionError, CorruptArchiveError

FORMAT_VERSION = 1

Span = tuple[int, int]


@dataclass
class ArchiveSentence:
    id: str
    text: str
    subword_spans: list[Span]
    data: np.ndarray  # float32 [num_layers][num_subwords][dim]

    @property
    def num_subwords(self) -> int:
        return len(self.subword_spans)


@dataclass
class EmbeddingArchive:
    model_name: str
    num_hidden_layers: int
    dim: int
    pooling: str = "mean"
    sentences: list[ArchiveSentence] = field(default_factory=list)

    @property
    def layer_names(self) -> list[str]:
        return ["static"] + [str(i) for i in range(self.num_hidden_layers + 1)]

    @property
    def num_layers(self) -> int:
        return self.num_hidden_layers + 2

    def sentence(self, sentence_id: str) -> ArchiveSentence:
        for s in self.sentences:
            if s.id == sentence_id:
                return s
        raise KeyError(sentence_id)


def write_archive(archive: EmbeddingArchive, path: str | Path) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, s in enumerate(archive.sentences):
        expected = (archive.num_layers, s.num_subwords, archive.dim)
        if s.data.shape != expected:
            raise CorruptArchiveError(
                f"sentence {s.id}: data shape {s.data.shape} != {expected}"
            )
        data_file = f"{i:06d}.bin"
        payload = np.ascontiguousarray(s.data, dtype="<f4").tobytes()
        (path / data_file).write_bytes(payload)
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
        "model_name": archive.model_name,
        "num_hidden_layers": archive.num_hidden_layers,
        "dim": archive.dim,
        "pooling": archive.pooling,
        "layer_names": archive.layer_names,
        "sentences": entries,
    }
    (path / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def read_archive(path: str | Path) -> EmbeddingArchive:
    path = Path(path)
    manifest_path = path / "manifest.json"
    if not manifest_path.exists():
        raise CorruptArchiveError(f"missing manifest.json in {path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorruptArchiveError(f"unreadable manifest.json: {exc}") from exc
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise ArchiveVersionError(
            f"unsupported archive format_version {version!r}, expected {FORMAT_VERSION}"
        )
    num_hidden_layers = manifest["num_hidden_layers"]
    dim = manifest["dim"]
    num_layers = num_hidden_layers + 2
    expected_names = ["static"] + [str(i) for i in range(num_hidden_layers + 1)]
    if manifest.get("layer_names") != expected_names:
        raise CorruptArchiveError(
            f"layer_names {manifest.get('layer_names')!r} do not match "
            f"num_hidden_layers={num_hidden_layers}"
        )
    archive = EmbeddingArchive(
        model_name=manifest["model_name"],
        num_hidden_layers=num_hidden_layers,
        dim=dim,
        pooling=manifest.get("pooling", "mean"),
    )
    for entry in manifest["sentences"]:
        m = entry["num_subwords"]
        spans = [tuple(p) for p in entry["subword_spans"]]
        if len(spans) != m:
            raise CorruptArchiveError(
                f"sentence {entry['id']}: {len(spans)} spans but num_subwords={m}"
            )
        blob = (path / entry["data_file"]).read_bytes()
        expected_bytes = num_layers * m * dim * 4
        if len(blob) != expected_bytes:
            raise CorruptArchiveError(
                f"sentence {entry['id']}: data file has {len(blob)} bytes, "
                f"expected {expected_bytes}"
            )
        data = np.frombuffer(blob, dtype="<f4").reshape(num_layers, m, dim)
        archive.sentences.append(
            ArchiveSentence(
                id=entry["id"], text=entry["text"], subword_spans=spans, data=data
            )
        )
    return archive


def validate_archive(archive: EmbeddingArchive) -> None:
    """Raise CorruptArchiveError on shape, span, or value violations."""
    for s in archive.sentences:
        expected = (archive.num_layers, s.num_subwords, archive.dim)
        if s.data.shape != expected:
            raise CorruptArchiveError(
                f"sentence {s.id}: data shape {s.data.shape} != {expected}"
            )
        if not np.all(np.isfinite(s.data)):
            raise CorruptArchiveError(f"sentence {s.id}: non-finite values")
        text_bytes = len(s.text.encode("utf-8"))
        prev_start = -1
        for start, end in s.subword_spans:
            if not (0 <= start < end <= text_bytes):
                raise CorruptArchiveError(
                    f"sentence {s.id}: span [{start},{end}) outside text "
                    f"of {text_bytes} bytes"
                )
            if start < prev_start:
                raise CorruptArchiveError(
                    f"sentence {s.id}: span starts decrease at [{start},{end})"
                )
            prev_start = start


def align_subwords(
    token_spans: Sequence[Span], subword_spans: Sequence[Span]
) -> dict[int, list[int]]:
    """Assign each subword to the token its span overlaps most.

    Keys are 0-based positions in token_spans; values are 0-based subword
    positions in ascending order. Ties go to the earlier token. Subwords
    overlapping no token are left out; a token with no subwords raises
    AlignmentError.
    """
    assignment: dict[int, list[int]] = {i: [] for i in range(len(token_spans))}
    for j, (s_start, s_end) in enumerate(subword_spans):
        best_token = None
        best_overlap = 0
        for i, (t_start, t_end) in enumerate(token_spans):
            overlap = min(s_end, t_end) - max(s_start, t_start)
            if overlap > best_overlap:
                best_overlap = overlap
                best_token = i
        if best_token is not None:
            assignment[best_token].append(j)
    for i, subs in assignment.items():
        if not subs:
            raise AlignmentError(
                f"token {i} with span {tuple(token_spans[i])} matched no subwords"
            )
    return assignment


def pool_token_vectors(
    data: np.ndarray, alignment: dict[int, list[int]], pooling: str = "mean"
) -> np.ndarray:
    """Word-level vectors [num_layers][num_tokens][dim] from subword data.

    mean: arithmetic mean over the token's subwords; first: the first
    subword's vector.
    """
    num_layers, _, dim = data.shape
    num_tokens = len(alignment)
    out = np.empty((num_layers, num_tokens, dim), dtype=data.dtype)
    for i in range(num_tokens):
        subs = alignment[i]
        if pooling == "mean":
            out[:, i, :] = data[:, subs, :].mean(axis=1)
        elif pooling == "first":
            out[:, i, :] = data[:, subs[0], :]
        else:
            raise ValueError(f"unknown pooling {pooling!r}")
    return out
