"""Experiment orchestration: balanced training sets, layerwise probes,
prototypicality splits, and the three evaluation designs.

Experiment 1 trains one probe per layer on natural sentences and evaluates
on held-out natural sentences, split by prototypicality. Experiment 2
reuses those probes unchanged on argument-swapped pairs. Experiment 3
retrains and evaluates on locally scrambled corpora.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .archive import EmbeddingArchive, align_subwords, pool_token_vectors
from .clauses import RoleLabel, find_transitive_clauses, label_roles
from .conllu import Sentence
from .errors import ConfigError, CoverageError, InsufficientDataError
from .perturb import SwappedPair, swap_corpus
from .probe import ProbeModel, TrainConfig, init_probe, predict_batch, train

SUBSETS_PROTO = ("all", "prototypical", "non_prototypical")
SUBSETS_SWAP = ("all", "original", "swapped")
ROLES = ("all", "subject", "object")
METRICS = ("accuracy", "macro_accuracy", "mean_subject_probability")


@dataclass(frozen=True)
class RunConfig:
    """Scalar knobs shared by all three experiments."""

    cap: int = 864
    epochs: int = 20
    learning_rate: float = 0.05
    batch_size: int = 32
    seed: int = 0
    pooling: str | None = None  # None: use the archive manifest's pooling


@dataclass
class EvalInstance:
    sentence_id: str
    token_index: int
    gold_role: RoleLabel
    condition: str  # natural | original | swapped | scrambled
    prototypical: bool | None = None
    probs: dict[str, float] = field(default_factory=dict)
    hard: dict[str, int] = field(default_factory=dict)


@dataclass
class ReportRow:
    layer_name: str
    subset: str
    gold_role: str
    metric: str
    value: float | None
    n: int


@dataclass
class ExperimentReport:
    experiment: str
    layer_names: list[str]
    subsets: tuple[str, ...]
    rows: list[ReportRow]
    config: dict


def derive_seed(base: int, *parts: str) -> int:
    digest = hashlib.sha256(":".join([str(base), *parts]).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def pooled_vectors(
    sentence: Sentence, archive: EmbeddingArchive, pooling: str
) -> np.ndarray:
    """Word-level vectors [num_layers][num_tokens][dim] for one sentence."""
    try:
        slice_ = archive.sentence(sentence.id)
    except KeyError:
        raise CoverageError(
            f"archive {archive.model_name!r} has no sentence {sentence.id!r}"
        ) from None
    token_spans = [t.char_span for t in sentence.tokens]
    alignment = align_subwords(token_spans, slice_.subword_spans)
    return pool_token_vectors(
        slice_.data.astype(np.float64), alignment, pooling=pooling
    )


def _labeled_instances(sentence: Sentence) -> list[tuple[int, RoleLabel]]:
    return [
        (idx, role)
        for idx, role in sorted(label_roles(sentence).items())
        if role is not RoleLabel.NEITHER
    ]


def collect_role_vectors(
    sentences: list[Sentence], archive: EmbeddingArchive, pooling: str
) -> tuple[list[tuple[str, int, RoleLabel]], np.ndarray]:
    """All SUBJECT/OBJECT instances with their per-layer vectors.

    Returns (instances, vectors) with vectors[num_layers][num_instances][dim]
    in instance order.
    """
    instances: list[tuple[str, int, RoleLabel]] = []
    columns: list[np.ndarray] = []
    for sentence in sentences:
        labeled = _labeled_instances(sentence)
        if not labeled:
            continue
        pooled = pooled_vectors(sentence, archive, pooling)
        for idx, role in labeled:
            instances.append((sentence.id, idx, role))
            columns.append(pooled[:, idx - 1, :])
    if columns:
        vectors = np.stack(columns, axis=1)
    else:
        vectors = np.zeros((archive.num_layers, 0, archive.dim))
    return instances, vectors


def build_training_set(
    sentences: list[Sentence],
    archive: EmbeddingArchive,
    layer_name: str,
    cap: int,
    seed: int,
    pooling: str | None = None,
) -> tuple[np.ndarray, np.ndarray, list[tuple[str, int]]]:
    """Balanced (vectors, labels, instance ids) at one layer.

    Each class is seeded-shuffled then truncated to min(cap, smaller class
    count). The selection depends only on the seed and instance list, not
    the layer, so every layer trains on the same instances.
    """
    pooling = pooling or archive.pooling
    layer_idx = archive.layer_names.index(layer_name)
    instances, vectors = collect_role_vectors(sentences, archive, pooling)
    subj_positions = [
        i for i, (_, _, role) in enumerate(instances) if role is RoleLabel.SUBJECT
    ]
    obj_positions = [
        i for i, (_, _, role) in enumerate(instances) if role is RoleLabel.OBJECT
    ]
    if not subj_positions or not obj_positions:
        raise InsufficientDataError(len(subj_positions), len(obj_positions))
    keep = min(cap, len(subj_positions), len(obj_positions))
    rng = np.random.default_rng(derive_seed(seed, "select"))
    subj_sel = [subj_positions[i] for i in rng.permutation(len(subj_positions))[:keep]]
    obj_sel = [obj_positions[i] for i in rng.permutation(len(obj_positions))[:keep]]
    chosen = subj_sel + obj_sel
    X = vectors[layer_idx, chosen, :]
    y = np.array([1.0] * keep + [0.0] * keep)
    ids = [(instances[i][0], instances[i][1]) for i in chosen]
    return X, y, ids


def train_layerwise_probes(
    sentences: list[Sentence], archive: EmbeddingArchive, cfg: RunConfig
) -> dict[str, tuple[ProbeModel, list[float]]]:
    """One trained probe (plus loss history) per layer name."""
    out: dict[str, tuple[ProbeModel, list[float]]] = {}
    for layer_name in archive.layer_names:
        X, y, _ = build_training_set(
            sentences, archive, layer_name, cfg.cap, cfg.seed, cfg.pooling
        )
        model = init_probe(
            archive.dim, seed=derive_seed(cfg.seed, "probe", layer_name),
            layer_name=layer_name,
        )
        train_cfg = TrainConfig(
            epochs=cfg.epochs,
            learning_rate=cfg.learning_rate,
            batch_size=cfg.batch_size,
            seed=derive_seed(cfg.seed, "shuffle", layer_name),
        )
        out[layer_name] = train(model, X, y, train_cfg)
    return out


def evaluate_instances(
    sentences: list[Sentence],
    archive: EmbeddingArchive,
    probes: dict[str, ProbeModel],
    pooling: str | None = None,
    condition: str = "natural",
) -> list[EvalInstance]:
    """Per-layer probabilities and hard labels for every labeled noun."""
    pooling = pooling or archive.pooling
    meta, vectors = collect_role_vectors(sentences, archive, pooling)
    instances = [
        EvalInstance(
            sentence_id=sid, token_index=idx, gold_role=role, condition=condition
        )
        for sid, idx, role in meta
    ]
    for layer_name, probe in probes.items():
        layer_idx = _archive_layer_index(archive, layer_name)
        probs, hard = predict_batch(probe, vectors[layer_idx])
        for inst, p, h in zip(instances, probs, hard):
            inst.probs[layer_name] = float(p)
            inst.hard[layer_name] = int(h)
    return instances


def _archive_layer_index(archive: EmbeddingArchive, layer_name: str) -> int:
    try:
        return archive.layer_names.index(layer_name)
    except ValueError:
        raise ConfigError(
            f"layer {layer_name!r} not in archive layers {archive.layer_names}"
        ) from None


def split_prototypicality(instances: list[EvalInstance]) -> None:
    """Mark each instance prototypical iff the static hard call matches gold.

    Uses the already-recorded static-layer hard label (strictly-greater-
    than-0.5 rule), so p = 0.5 counts as an object prediction.
    """
    for inst in instances:
        static_hard = inst.hard["static"]
        gold = 1 if inst.gold_role is RoleLabel.SUBJECT else 0
        inst.prototypical = static_hard == gold


def check_disjoint(train_sentences: list[Sentence], eval_sentences: list[Sentence]) -> None:
    overlap = {s.id for s in train_sentences} & {s.id for s in eval_sentences}
    if overlap:
        sample = ", ".join(sorted(overlap)[:5])
        raise ConfigError(
            f"train and eval sentence ids overlap ({len(overlap)} shared, "
            f"e.g. {sample})"
        )


def _subset_filter(instances, subset):
    if subset == "all":
        return instances
    if subset == "prototypical":
        return [i for i in instances if i.prototypical]
    if subset == "non_prototypical":
        return [i for i in instances if not i.prototypical]
    # swap-condition subsets
    return [i for i in instances if i.condition == subset]


def _role_filter(instances, role):
    if role == "all":
        return instances
    want = RoleLabel.SUBJECT if role == "subject" else RoleLabel.OBJECT
    return [i for i in instances if i.gold_role is want]


def _accuracy(instances, layer_name):
    if not instances:
        return None
    good = sum(
        1
        for i in instances
        if i.hard[layer_name] == (1 if i.gold_role is RoleLabel.SUBJECT else 0)
    )
    return good / len(instances)


def _macro_accuracy(instances, layer_name):
    per_role = []
    for role in ("subject", "object"):
        subset = _role_filter(instances, role)
        acc = _accuracy(subset, layer_name)
        if acc is not None:
            per_role.append(acc)
    if not per_role:
        return None
    return sum(per_role) / len(per_role)


def _mean_probability(instances, layer_name):
    if not instances:
        return None
    return sum(i.probs[layer_name] for i in instances) / len(instances)


def aggregate(
    experiment: str,
    instances: list[EvalInstance],
    layer_names: list[str],
    subsets: tuple[str, ...],
    config: dict,
) -> ExperimentReport:
    rows: list[ReportRow] = []
    for layer_name in layer_names:
        for subset in subsets:
            in_subset = _subset_filter(instances, subset)
            for role in ROLES:
                cell = _role_filter(in_subset, role)
                n = len(cell)
                for metric in METRICS:
                    if metric == "accuracy":
                        value = _accuracy(cell, layer_name)
                    elif metric == "macro_accuracy":
                        value = _macro_accuracy(cell, layer_name)
                    else:
                        value = _mean_probability(cell, layer_name)
                    rows.append(
                        ReportRow(
                            layer_name=layer_name,
                            subset=subset,
                            gold_role=role,
                            metric=metric,
                            value=value,
                            n=n,
                        )
                    )
    return ExperimentReport(
        experiment=experiment,
        layer_names=list(layer_names),
        subsets=subsets,
        rows=rows,
        config=config,
    )


def _upos_counts(sentences: list[Sentence]) -> dict[str, int]:
    counts: Counter[str] = Counter()
    for s in sentences:
        for idx, role in label_roles(s).items():
            if role is not RoleLabel.NEITHER:
                counts[s.token(idx).upos] += 1
    return dict(sorted(counts.items()))


def _base_config(
    experiment: str,
    archive: EmbeddingArchive,
    cfg: RunConfig,
    train_sentences: list[Sentence],
    eval_sentences: list[Sentence],
) -> dict:
    return {
        "experiment": experiment,
        "model_name": archive.model_name,
        "num_hidden_layers": archive.num_hidden_layers,
        "dim": archive.dim,
        "pooling": cfg.pooling or archive.pooling,
        "cap": cfg.cap,
        "epochs": cfg.epochs,
        "learning_rate": cfg.learning_rate,
        "batch_size": cfg.batch_size,
        "seed": cfg.seed,
        "hidden_units": 64,
        "num_train_sentences": len(train_sentences),
        "num_eval_sentences": len(eval_sentences),
        "eval_argument_upos_counts": _upos_counts(eval_sentences),
    }


def run_experiment1(
    train_sentences: list[Sentence],
    train_archive: EmbeddingArchive,
    eval_sentences: list[Sentence],
    eval_archive: EmbeddingArchive,
    cfg: RunConfig,
    probes: dict[str, ProbeModel] | None = None,
    experiment: str = "exp1",
    condition: str = "natural",
) -> tuple[ExperimentReport, dict[str, ProbeModel], list[EvalInstance]]:
    """Train (or reuse) layerwise probes and evaluate with a prototypicality split."""
    check_disjoint(train_sentences, eval_sentences)
    if probes is None:
        trained = train_layerwise_probes(train_sentences, train_archive, cfg)
        probes = {name: model for name, (model, _) in trained.items()}
    instances = evaluate_instances(
        eval_sentences, eval_archive, probes, cfg.pooling, condition=condition
    )
    split_prototypicality(instances)
    config = _base_config(experiment, eval_archive, cfg, train_sentences, eval_sentences)
    report = aggregate(
        experiment, instances, eval_archive.layer_names, SUBSETS_PROTO, config
    )
    return report, probes, instances


def build_swap_pairs(sentences: list[Sentence]) -> list[SwappedPair]:
    """One pair per eligible clause; no prototypicality filtering."""
    return swap_corpus(sentences)


def run_experiment2(
    probes: dict[str, ProbeModel],
    pairs: list[SwappedPair],
    eval_archive: EmbeddingArchive,
    swapped_archive: EmbeddingArchive,
    cfg: RunConfig,
) -> tuple[ExperimentReport, list[EvalInstance]]:
    """Evaluate the four swap cells with Experiment-1 probes, unchanged.

    Every pair contributes four cells: its original subject and object and
    the same two slots in the swapped sentence with positional gold (the
    moved-in word at the subject slot is gold SUBJECT). Counts per cell
    therefore all equal the number of pairs.
    """
    pooling = cfg.pooling or eval_archive.pooling
    instances: list[EvalInstance] = []
    for pair in pairs:
        for sentence, archive, condition in (
            (pair.original, eval_archive, "original"),
            (pair.swapped, swapped_archive, "swapped"),
        ):
            pooled = pooled_vectors(sentence, archive, pooling)
            for idx, role in (
                (pair.clause.subj_index, RoleLabel.SUBJECT),
                (pair.clause.obj_index, RoleLabel.OBJECT),
            ):
                inst = EvalInstance(
                    sentence_id=sentence.id,
                    token_index=idx,
                    gold_role=role,
                    condition=condition,
                )
                for layer_name, probe in probes.items():
                    layer_idx = _archive_layer_index(archive, layer_name)
                    probs, hard = predict_batch(
                        probe, pooled[layer_idx, idx - 1 : idx, :]
                    )
                    inst.probs[layer_name] = float(probs[0])
                    inst.hard[layer_name] = int(hard[0])
                instances.append(inst)
    config = {
        "experiment": "exp2",
        "model_name": eval_archive.model_name,
        "num_hidden_layers": eval_archive.num_hidden_layers,
        "dim": eval_archive.dim,
        "pooling": pooling,
        "cap": cfg.cap,
        "epochs": cfg.epochs,
        "learning_rate": cfg.learning_rate,
        "batch_size": cfg.batch_size,
        "seed": cfg.seed,
        "hidden_units": 64,
        "num_pairs": len(pairs),
    }
    report = aggregate(
        "exp2", instances, eval_archive.layer_names, SUBSETS_SWAP, config
    )
    return report, instances


def run_experiment3(
    scrambled_train: list[Sentence],
    train_archive: EmbeddingArchive,
    scrambled_eval: list[Sentence],
    eval_archive: EmbeddingArchive,
    cfg: RunConfig,
) -> tuple[ExperimentReport, dict[str, ProbeModel], list[EvalInstance]]:
    """Retrain on scrambled sentences, evaluate on scrambled sentences.

    Prototypicality comes from the scrambled-trained static probe. Gold
    roles are read from the scrambled trees directly: dependency edges
    travel with the words during scrambling.
    """
    return run_experiment1(
        scrambled_train,
        train_archive,
        scrambled_eval,
        eval_archive,
        cfg,
        experiment="exp3",
        condition="scrambled",
    )
