"""CoNLL-U treebank loading, surface-text reconstruction, and serialization.

Character spans are byte offsets into the UTF-8 encoding of the reconstructed
sentence text, so they stay exact for non-ASCII forms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import ConlluParseError

NUM_COLUMNS = 10

_RANGE_ID = re.compile(r"^(\d+)-(\d+)$")
_EMPTY_NODE_ID = re.compile(r"^\d+\.\d+$")


@dataclass
class Token:
    """One syntactic word of a sentence."""

    index: int  # 1-based position
    form: str
    lemma: str
    upos: str
    feats: dict[str, str]
    head: int  # 0 = root
    deprel: str
    space_after: bool = True
    char_span: tuple[int, int] | None = None  # [start, end) byte offsets into text


@dataclass
class MultiwordRange:
    """Surface form covering a contiguous run of syntactic tokens (e.g. "don't")."""

    start: int
    end: int
    form: str
    space_after: bool = True


@dataclass
class Sentence:
    id: str
    tokens: list[Token]
    text: str = ""
    ranges: list[MultiwordRange] = field(default_factory=list)
    declared_text: str | None = None  # "# text =" comment, when present

    def __len__(self) -> int:
        return len(self.tokens)

    def token(self, index: int) -> Token:
        """Token by its 1-based treebank index."""
        return self.tokens[index - 1]

    def covered_by_range(self) -> set[int]:
        """Indices of tokens whose surface form is supplied by a multiword range."""
        out: set[int] = set()
        for r in self.ranges:
            out.update(range(r.start, r.end + 1))
        return out


def parse_feats(raw: str) -> dict[str, str]:
    if raw in ("_", ""):
        return {}
    feats = {}
    for pair in raw.split("|"):
        key, _, value = pair.partition("=")
        if key:
            feats[key] = value
    return feats


def format_feats(feats: dict[str, str]) -> str:
    if not feats:
        return "_"
    return "|".join(f"{k}={feats[k]}" for k in sorted(feats))


def _space_after(misc: str) -> bool:
    return "SpaceAfter=No" not in misc.split("|")


def parse_conllu(source: str | Iterable[str], id_prefix: str = "s") -> list[Sentence]:
    """Parse CoNLL-U text into sentences, reconstructing text and spans.

    `source` may be a string, an open text file, or any iterable of lines.
    Multiword range lines are kept for surface reconstruction only; empty
    nodes are skipped. Sentences without a `sent_id` comment get synthetic
    ids `{id_prefix}1`, `{id_prefix}2`, ...
    """
    if isinstance(source, str):
        lines: Iterator[str] = iter(source.splitlines())
    else:
        lines = (ln.rstrip("\n") for ln in source)

    sentences: list[Sentence] = []
    block: list[tuple[int, str]] = []
    for line_no, line in enumerate(lines, start=1):
        if line.strip() == "":
            if block:
                sentences.append(_parse_block(block, len(sentences) + 1, id_prefix))
                block = []
        else:
            block.append((line_no, line))
    if block:
        sentences.append(_parse_block(block, len(sentences) + 1, id_prefix))
    return sentences


def _parse_block(block: list[tuple[int, str]], ordinal: int, id_prefix: str) -> Sentence:
    sent_id: str | None = None
    declared_text: str | None = None
    tokens: list[Token] = []
    ranges: list[MultiwordRange] = []
    seen: set[int] = set()
    first_line = block[0][0]

    for line_no, line in block:
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("sent_id"):
                sent_id = body.partition("=")[2].strip()
            elif body.startswith("text ") or body.startswith("text="):
                declared_text = body.partition("=")[2].strip()
            continue
        cols = line.split("\t")
        if len(cols) != NUM_COLUMNS:
            raise ConlluParseError(
                f"expected {NUM_COLUMNS} tab-separated columns, got {len(cols)}",
                line=line_no,
            )
        idx_field = cols[0]
        m = _RANGE_ID.match(idx_field)
        if m:
            ranges.append(
                MultiwordRange(
                    start=int(m.group(1)),
                    end=int(m.group(2)),
                    form=cols[1],
                    space_after=_space_after(cols[9]),
                )
            )
            continue
        if _EMPTY_NODE_ID.match(idx_field):
            continue
        if not idx_field.isdigit():
            raise ConlluParseError(f"non-numeric token index {idx_field!r}", line=line_no)
        index = int(idx_field)
        if index < 1:
            raise ConlluParseError(f"token index must be >= 1, got {index}", line=line_no)
        if index in seen:
            raise ConlluParseError(f"duplicate token index {index}", line=line_no)
        seen.add(index)
        head_field = cols[6]
        if not head_field.isdigit():
            raise ConlluParseError(f"non-numeric head {head_field!r}", line=line_no)
        head = int(head_field)
        if head == index:
            raise ConlluParseError(f"token {index} is its own head", line=line_no)
        tokens.append(
            Token(
                index=index,
                form=cols[1],
                lemma=cols[2],
                upos=cols[3],
                feats=parse_feats(cols[5]),
                head=head,
                deprel=cols[7],
                space_after=_space_after(cols[9]),
            )
        )

    if not tokens:
        raise ConlluParseError("sentence block contains no tokens", line=first_line)
    tokens.sort(key=lambda t: t.index)
    n = len(tokens)
    if [t.index for t in tokens] != list(range(1, n + 1)):
        raise ConlluParseError(
            f"token indices are not contiguous 1..{n}", line=first_line
        )
    roots = [t.index for t in tokens if t.head == 0]
    if len(roots) != 1:
        raise ConlluParseError(
            f"expected exactly one root token, found {len(roots)}", line=first_line
        )
    for t in tokens:
        if t.head > n:
            raise ConlluParseError(
                f"token {t.index} points to nonexistent head {t.head}", line=first_line
            )
    ranges.sort(key=lambda r: r.start)
    prev_end = 0
    for r in ranges:
        if not (1 <= r.start <= r.end <= n):
            raise ConlluParseError(
                f"range {r.start}-{r.end} outside token indices 1..{n}", line=first_line
            )
        if r.start <= prev_end:
            raise ConlluParseError(
                f"range {r.start}-{r.end} overlaps a previous range", line=first_line
            )
        prev_end = r.end

    sentence = Sentence(
        id=sent_id if sent_id is not None else f"{id_prefix}{ordinal}",
        tokens=tokens,
        ranges=ranges,
        declared_text=declared_text,
    )
    return reconstruct_text(sentence)


def reconstruct_text(sentence: Sentence) -> Sentence:
    """Fill `sentence.text` and every token's byte-offset char span.

    Forms are joined by single spaces, suppressed after tokens (or ranges)
    with space_after=False. Tokens covered by a multiword range take their
    span from the position of their form inside the range form; if a form
    cannot be located there, the token shares the whole range span.
    """
    range_at = {r.start: r for r in sentence.ranges}
    parts: list[str] = []
    cursor = 0  # byte offset
    i = 1
    n = len(sentence.tokens)
    while i <= n:
        r = range_at.get(i)
        if r is not None:
            chunk = r.form
            chunk_bytes = chunk.encode("utf-8")
            search = 0
            for j in range(r.start, r.end + 1):
                tok = sentence.token(j)
                sub = tok.form.encode("utf-8")
                pos = chunk_bytes.find(sub, search)
                if pos >= 0:
                    tok.char_span = (cursor + pos, cursor + pos + len(sub))
                    search = pos + len(sub)
                else:
                    tok.char_span = (cursor, cursor + len(chunk_bytes))
            space = r.space_after
            advance = len(chunk_bytes)
            i = r.end + 1
        else:
            tok = sentence.token(i)
            chunk = tok.form
            advance = len(chunk.encode("utf-8"))
            tok.char_span = (cursor, cursor + advance)
            space = tok.space_after
            i += 1
        parts.append(chunk)
        cursor += advance
        if i <= n and space:
            parts.append(" ")
            cursor += 1
    sentence.text = "".join(parts)
    return sentence


def to_conllu(sentence: Sentence) -> str:
    """Serialize one sentence back to a CoNLL-U block (without trailing blank line)."""
    lines = [f"# sent_id = {sentence.id}"]
    if sentence.text:
        lines.append(f"# text = {sentence.text}")
    range_at = {r.start: r for r in sentence.ranges}
    covered = sentence.covered_by_range()
    for tok in sentence.tokens:
        r = range_at.get(tok.index)
        if r is not None:
            misc = "_" if r.space_after else "SpaceAfter=No"
            lines.append(f"{r.start}-{r.end}\t{r.form}\t_\t_\t_\t_\t_\t_\t_\t{misc}")
        if tok.index in covered:
            misc = "_"
        else:
            misc = "_" if tok.space_after else "SpaceAfter=No"
        lines.append(
            "\t".join(
                [
                    str(tok.index),
                    tok.form,
                    tok.lemma or "_",
                    tok.upos or "_",
                    "_",
                    format_feats(tok.feats),
                    str(tok.head),
                    tok.deprel or "_",
                    "_",
                    misc,
                ]
            )
        )
    return "\n".join(lines)


def load_treebank(path: str | Path) -> list[Sentence]:
    """Parse a CoNLL-U file; synthetic ids are prefixed with the file stem."""
    path = Path(path)
    with path.open(encoding="utf-8") as f:
        return parse_conllu(f, id_prefix=f"{path.stem}-")


def write_treebank(sentences: Iterable[Sentence], path: str | Path) -> None:
    path = Path(path)
    blocks = [to_conllu(s) for s in sentences]
    path.write_text("\n\n".join(blocks) + "\n", encoding="utf-8")


def byte_slice(text: str, span: tuple[int, int]) -> str:
    """The substring addressed by a byte-offset span."""
    return text.encode("utf-8")[span[0] : span[1]].decode("utf-8")
