"""Transitive-clause detection, gold role labeling, and swap eligibility.

A clause is a verb with at least one child attached by deprel "nsubj" and at
least one by "obj" (exact matches; subtypes like nsubj:pass are excluded
because passives invert the roles being probed). Role labels apply only to
NOUN/PROPN tokens; anything else, and any token with conflicting roles
across clauses, is NEITHER.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .conllu import Sentence, Token

NOUN_TAGS = frozenset({"NOUN", "PROPN"})

POS_FILTER = "pos_filter"
NUMBER_FILTER = "number_filter"
COMPOUND_FLAT_FILTER = "compound_flat_filter"


class RoleLabel(Enum):
    SUBJECT = "subject"
    OBJECT = "object"
    NEITHER = "neither"


@dataclass(frozen=True)
class ClauseInstance:
    """One verb with a direct subject and a direct object."""

    sentence_id: str
    verb_index: int
    subj_index: int
    obj_index: int
    swap_eligible: bool
    eligibility_failures: tuple[str, ...]


def find_transitive_clauses(sentence: Sentence) -> list[ClauseInstance]:
    """All (verb, subject, object) triples in the sentence.

    A verb with several nsubj or obj children yields every cross pair.
    """
    children: dict[int, list[Token]] = {}
    for tok in sentence.tokens:
        children.setdefault(tok.head, []).append(tok)
    clauses: list[ClauseInstance] = []
    for verb in sentence.tokens:
        kids = children.get(verb.index, [])
        subjects = [t for t in kids if t.deprel == "nsubj"]
        objects = [t for t in kids if t.deprel == "obj"]
        if not subjects or not objects:
            continue
        for subj in subjects:
            for obj in objects:
                if subj.index == obj.index:
                    continue
                eligible, failures = _check_eligibility(sentence, subj, obj)
                clauses.append(
                    ClauseInstance(
                        sentence_id=sentence.id,
                        verb_index=verb.index,
                        subj_index=subj.index,
                        obj_index=obj.index,
                        swap_eligible=eligible,
                        eligibility_failures=failures,
                    )
                )
    return clauses


def resolve_role_claims(
    claims: Iterable[tuple[int, RoleLabel]],
) -> dict[int, RoleLabel]:
    """Collapse per-clause role claims; conflicting claims become NEITHER.

    Basic single-headed trees cannot produce a conflict (one deprel per
    token), but multi-clause extraction is kept honest by resolving here.
    """
    claimed: dict[int, RoleLabel] = {}
    conflicted: set[int] = set()
    for idx, role in claims:
        if idx in claimed and claimed[idx] is not role:
            conflicted.add(idx)
        claimed[idx] = role
    for idx in conflicted:
        claimed[idx] = RoleLabel.NEITHER
    return claimed


def label_roles(sentence: Sentence) -> dict[int, RoleLabel]:
    """Gold role per token index: SUBJECT, OBJECT, or NEITHER.

    Only NOUN/PROPN clause arguments get a role; a token filling both roles
    in different clauses is NEITHER.
    """
    labels = {tok.index: RoleLabel.NEITHER for tok in sentence.tokens}
    claims = []
    for clause in find_transitive_clauses(sentence):
        for idx, role in (
            (clause.subj_index, RoleLabel.SUBJECT),
            (clause.obj_index, RoleLabel.OBJECT),
        ):
            if sentence.token(idx).upos in NOUN_TAGS:
                claims.append((idx, role))
    labels.update(resolve_role_claims(claims))
    return labels


def swap_eligible(
    clause: ClauseInstance, sentence: Sentence
) -> tuple[bool, tuple[str, ...]]:
    """Whether the clause's arguments may be swapped, with named failures.

    Requires NOUN/PROPN on both arguments, an explicit matching Number
    feature, and no compound or flat edge (any subtype) touching either one.
    """
    subj = sentence.token(clause.subj_index)
    obj = sentence.token(clause.obj_index)
    return _check_eligibility(sentence, subj, obj)


def _check_eligibility(
    sentence: Sentence, subj: Token, obj: Token
) -> tuple[bool, tuple[str, ...]]:
    failures: list[str] = []
    if subj.upos not in NOUN_TAGS or obj.upos not in NOUN_TAGS:
        failures.append(POS_FILTER)
    subj_num = subj.feats.get("Number")
    obj_num = obj.feats.get("Number")
    if subj_num is None or obj_num is None or subj_num != obj_num:
        failures.append(NUMBER_FILTER)
    if _touches_compound_or_flat(sentence, subj.index) or _touches_compound_or_flat(
        sentence, obj.index
    ):
        failures.append(COMPOUND_FLAT_FILTER)
    return (not failures, tuple(failures))


def _is_compound_or_flat(deprel: str) -> bool:
    base = deprel.split(":", 1)[0]
    return base in ("compound", "flat")


def _touches_compound_or_flat(sentence: Sentence, index: int) -> bool:
    """True if the token heads or depends on any compound/flat edge."""
    tok = sentence.token(index)
    if _is_compound_or_flat(tok.deprel):
        return True
    return any(
        t.head == index and _is_compound_or_flat(t.deprel) for t in sentence.tokens
    )
