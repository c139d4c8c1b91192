"""Argument swapping and displacement-bounded local scrambling.

Swaps exchange only the two argument head words (their form, lemma, UPOS,
and feats); dependents such as determiners stay in place, and tree shape,
spacing, and casing are untouched. Scrambles reorder whole tokens under a
uniform random permutation with |new - old| <= k for every position.
"""

from __future__ import annotations

import copy
import hashlib
import json
import random
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from .clauses import ClauseInstance, RoleLabel, find_transitive_clauses, label_roles
from .conllu import Sentence, Token, reconstruct_text, write_treebank
from .errors import SwapEligibilityError

LEXICAL_FIELDS = ("form", "lemma", "upos", "feats")


@dataclass
class SwappedPair:
    original: Sentence
    swapped: Sentence
    clause: ClauseInstance
    subj_new_index: int  # position now holding the original subject word
    obj_new_index: int


@dataclass
class ScrambledSentence:
    original: Sentence
    scrambled: Sentence
    permutation: list[int]  # 1-based: original position i moves to permutation[i-1]
    seed: int


def swap_arguments(
    sentence: Sentence, clause: ClauseInstance, swapped_id: str | None = None
) -> SwappedPair:
    """Exchange the subject and object head words of an eligible clause.

    Raises SwapEligibilityError when the clause failed any eligibility
    filter. The swapped sentence keeps the original tree positions; gold
    roles for it come from re-running label_roles, under which the word
    moved into the subject slot is the new subject.
    """
    if not clause.swap_eligible:
        raise SwapEligibilityError(sentence.id, clause.eligibility_failures)
    swapped = copy.deepcopy(sentence)
    swapped.id = swapped_id if swapped_id is not None else f"{sentence.id}-swap"
    subj = swapped.token(clause.subj_index)
    obj = swapped.token(clause.obj_index)
    for field in LEXICAL_FIELDS:
        subj_val = getattr(subj, field)
        setattr(subj, field, getattr(obj, field))
        setattr(obj, field, subj_val)
    # a multiword surface form covering either slot would no longer match
    swapped.ranges = [
        r
        for r in swapped.ranges
        if not (r.start <= clause.subj_index <= r.end)
        and not (r.start <= clause.obj_index <= r.end)
    ]
    reconstruct_text(swapped)
    return SwappedPair(
        original=sentence,
        swapped=swapped,
        clause=clause,
        subj_new_index=clause.obj_index,
        obj_new_index=clause.subj_index,
    )


def swap_corpus(sentences: Iterable[Sentence]) -> list[SwappedPair]:
    """Swapped pairs for every eligible clause, ids suffixed -swap1, -swap2, ..."""
    pairs: list[SwappedPair] = []
    for sentence in sentences:
        eligible = [c for c in find_transitive_clauses(sentence) if c.swap_eligible]
        for ordinal, clause in enumerate(eligible, start=1):
            pairs.append(
                swap_arguments(sentence, clause, f"{sentence.id}-swap{ordinal}")
            )
    return pairs


@lru_cache(maxsize=None)
def _options(
    n: int, k: int, i: int, used: frozenset[int]
) -> tuple[int, tuple[tuple[int, frozenset[int], int], ...]]:
    """(total, candidates) for position i of a partial bounded permutation.

    `used` holds the already-taken target positions inside the window
    [i-k, i+k]; positions below the window are guaranteed filled, positions
    above it untouched. Each candidate is (target, successor state, number
    of completions through that target); zero-completion targets are
    dropped. Cached, so sampling pays the set arithmetic once per state.
    """
    total = 0
    candidates = []
    for target in range(max(1, i - k), min(n, i + k) + 1):
        if target in used:
            continue
        nxt = set(used)
        nxt.add(target)
        drop = i - k
        if drop >= 1:
            if drop not in nxt:
                continue  # that slot is now unreachable by any later position
            nxt.discard(drop)
        count = _completions(n, k, i + 1, frozenset(nxt))
        if count:
            candidates.append((target, frozenset(nxt), count))
            total += count
    return total, tuple(candidates)


@lru_cache(maxsize=None)
def _completions(n: int, k: int, i: int, used: frozenset[int]) -> int:
    """Ways to extend a partial bounded permutation."""
    if i > n:
        return 1
    return _options(n, k, i, used)[0]


def count_bounded_permutations(n: int, k: int) -> int:
    """How many permutations of 1..n satisfy |pi(i) - i| <= k for all i."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _completions(n, k, 1, frozenset())


def sample_bounded_permutation(n: int, k: int, seed: int) -> list[int]:
    """Uniform sample over permutations of 1..n with displacement at most k.

    Sequentially picks each target with probability proportional to the
    exact number of valid completions, so all valid permutations are
    equally likely. Deterministic given seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if k < 0:
        raise ValueError("k must be >= 0")
    rng = random.Random(seed)
    pi = [0] * n
    used: frozenset[int] = frozenset()
    for i in range(1, n + 1):
        total, candidates = _options(n, k, i, used)
        draw = rng.randrange(total)
        for target, frozen, count in candidates:
            if draw < count:
                pi[i - 1] = target
                used = frozen
                break
            draw -= count
    return pi


def scramble_local(sentence: Sentence, k: int = 2, seed: int = 0) -> ScrambledSentence:
    """Reorder tokens by a uniform bounded permutation; heads follow words.

    The scrambled sentence keeps the original id (it is a variant of the
    same sentence, stored in a separate corpus), drops multiword ranges,
    and is rendered with single spaces everywhere.
    """
    n = len(sentence.tokens)
    pi = sample_bounded_permutation(n, k, seed)
    new_tokens: list[Token] = [None] * n  # type: ignore[list-item]
    for tok in sentence.tokens:
        new_index = pi[tok.index - 1]
        new_tokens[new_index - 1] = Token(
            index=new_index,
            form=tok.form,
            lemma=tok.lemma,
            upos=tok.upos,
            feats=dict(tok.feats),
            head=0 if tok.head == 0 else pi[tok.head - 1],
            deprel=tok.deprel,
            space_after=True,
        )
    scrambled = Sentence(id=sentence.id, tokens=new_tokens)
    reconstruct_text(scrambled)
    return ScrambledSentence(
        original=sentence, scrambled=scrambled, permutation=pi, seed=seed
    )


def derive_seed(global_seed: int, sentence_id: str) -> int:
    """Stable per-sentence seed, independent of interpreter hash randomization."""
    digest = hashlib.sha256(f"{global_seed}:{sentence_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def scramble_corpus(
    sentences: Iterable[Sentence], k: int = 2, global_seed: int = 0
) -> list[ScrambledSentence]:
    return [
        scramble_local(s, k=k, seed=derive_seed(global_seed, s.id)) for s in sentences
    ]


def _role_map(sentence: Sentence) -> dict[str, str]:
    return {
        str(idx): role.value
        for idx, role in label_roles(sentence).items()
        if role is not RoleLabel.NEITHER
    }


def write_swapped_corpus(pairs: Sequence[SwappedPair], out_dir: str | Path) -> None:
    """Emit swapped sentences as CoNLL-U plus a provenance sidecar."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_treebank([p.swapped for p in pairs], out_dir / "swapped.conllu")
    entries = []
    for p in pairs:
        token_map = {str(t.index): t.index for t in p.swapped.tokens}
        token_map[str(p.clause.subj_index)] = p.clause.obj_index
        token_map[str(p.clause.obj_index)] = p.clause.subj_index
        entries.append(
            {
                "id": p.swapped.id,
                "original_id": p.original.id,
                "verb_index": p.clause.verb_index,
                "subj_index": p.clause.subj_index,
                "obj_index": p.clause.obj_index,
                "token_map": token_map,
                "roles": _role_map(p.swapped),
            }
        )
    sidecar = {"kind": "swap", "entries": entries}
    (out_dir / "sidecar.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def write_scrambled_corpus(
    scrambles: Sequence[ScrambledSentence], out_dir: str | Path, k: int
) -> None:
    """Emit scrambled sentences as CoNLL-U plus a provenance sidecar.

    Roles travel with the words: the sidecar role for a scrambled position
    is the gold role of the word that originally sat elsewhere.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_treebank([sc.scrambled for sc in scrambles], out_dir / "scrambled.conllu")
    entries = []
    for sc in scrambles:
        original_roles = label_roles(sc.original)
        roles = {}
        token_map = {}
        for orig_index, new_index in enumerate(sc.permutation, start=1):
            token_map[str(new_index)] = orig_index
            role = original_roles[orig_index]
            if role is not RoleLabel.NEITHER:
                roles[str(new_index)] = role.value
        entries.append(
            {
                "id": sc.scrambled.id,
                "original_id": sc.original.id,
                "seed": sc.seed,
                "permutation": sc.permutation,
                "token_map": token_map,
                "roles": roles,
            }
        )
    sidecar = {"kind": "scramble", "max_displacement": k, "entries": entries}
    (out_dir / "sidecar.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
