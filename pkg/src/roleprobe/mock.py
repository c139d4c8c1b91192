"""Deterministic mock embedder for running the pipeline without any model.

Geometry per token vector of dimension d (d >= 3):
  coordinate 0: lexical prior in [-1, 1], a seeded hash of the lemma,
    identical at every layer and in every sentence;
  coordinate 1: (layer_depth / L) * r, where r is +1 when the token sits
    before its governing verb, -1 after it, 0 when it has no verb ancestor;
    layer_depth is 0 for both "static" and layer "0", then 1..L;
  coordinates 2..d-1: Gaussian noise scaled by the noise knob. Static-layer
    noise is keyed by lemma alone, so a word's static vector is the same
    everywhere; contextual noise is keyed by sentence id and position.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .archive import ArchiveSentence, EmbeddingArchive
from .conllu import Sentence
from .errors import ConfigError


@dataclass(frozen=True)
class MockConfig:
    num_hidden_layers: int = 6
    dim: int = 16
    seed: int = 0
    noise: float = 0.1

    def __post_init__(self) -> None:
        if self.dim < 3:
            raise ConfigError(
                f"mock embeddings need dim >= 3, got {self.dim} "
                "(coordinates 0 and 1 are reserved, noise needs >= 1)"
            )
        if self.num_hidden_layers < 1:
            raise ConfigError("num_hidden_layers must be >= 1")

    @property
    def model_name(self) -> str:
        return (
            f"mock-L{self.num_hidden_layers}-d{self.dim}"
            f"-seed{self.seed}-noise{self.noise}"
        )


def _hash_to_unit(parts: Iterable[str]) -> float:
    """Deterministic value in [-1, 1] from string parts."""
    digest = hashlib.sha256(":".join(parts).encode()).digest()
    u = int.from_bytes(digest[:8], "big")
    return u / float(2**64 - 1) * 2.0 - 1.0


def _hash_to_seed(parts: Iterable[str]) -> int:
    digest = hashlib.sha256(":".join(parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def lexical_prior(seed: int, lemma: str) -> float:
    return _hash_to_unit([str(seed), "lex", lemma])


def verb_direction(sentence: Sentence, token_index: int) -> int:
    """+1 before the nearest verb ancestor, -1 after, 0 when none exists."""
    current = sentence.token(token_index)
    for _ in range(len(sentence.tokens)):
        if current.head == 0:
            return 0
        parent = sentence.token(current.head)
        if parent.upos == "VERB":
            return 1 if token_index < parent.index else -1
        current = parent
    return 0


def mock_embed(sentence: Sentence, config: MockConfig) -> ArchiveSentence:
    """Embed one sentence: one subword per token, layers [static, 0..L]."""
    L = config.num_hidden_layers
    d = config.dim
    n = len(sentence.tokens)
    num_layers = L + 2
    data = np.zeros((num_layers, n, d), dtype=np.float64)

    depth = np.array([0] + list(range(L + 1)), dtype=np.float64)  # static, 0, 1..L
    for tok in sentence.tokens:
        col = tok.index - 1
        data[:, col, 0] = lexical_prior(config.seed, tok.lemma)
        r = verb_direction(sentence, tok.index)
        data[:, col, 1] = depth / L * r
        static_rng = np.random.default_rng(
            _hash_to_seed([str(config.seed), "static", tok.lemma])
        )
        data[0, col, 2:] = static_rng.standard_normal(d - 2) * config.noise

    ctx_rng = np.random.default_rng(
        _hash_to_seed([str(config.seed), "ctx", sentence.id])
    )
    data[1:, :, 2:] = ctx_rng.standard_normal((L + 1, n, d - 2)) * config.noise

    spans = [tok.char_span for tok in sentence.tokens]
    return ArchiveSentence(
        id=sentence.id,
        text=sentence.text,
        subword_spans=spans,
        data=data.astype(np.float32),
    )


def mock_embed_corpus(
    sentences: Iterable[Sentence], config: MockConfig
) -> EmbeddingArchive:
    archive = EmbeddingArchive(
        model_name=config.model_name,
        num_hidden_layers=config.num_hidden_layers,
        dim=config.dim,
        pooling="mean",
    )
    for sentence in sentences:
        archive.sentences.append(mock_embed(sentence, config))
    return archive
