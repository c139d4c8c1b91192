"""Command-line interface.

Subcommands cover the full pipeline: clause extraction, argument swaps and
local scrambles, mock embedding, archive validation, probe training, the
three experiments, and report rendering.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .archive import read_archive, validate_archive, write_archive
from .clauses import find_transitive_clauses, label_roles, swap_eligible
from .conllu import load_treebank
from .errors import RoleProbeError
from .experiment import (
    RunConfig,
    build_swap_pairs,
    run_experiment1,
    run_experiment2,
    run_experiment3,
    train_layerwise_probes,
)
from .mock import MockConfig, mock_embed_corpus
from .perturb import (
    scramble_corpus,
    swap_corpus,
    write_scrambled_corpus,
    write_swapped_corpus,
)
from .probe import TrainConfig, load_probe, save_probe
from .report import read_json, write_csv, write_json, write_svg


def _add_train_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--cap", type=int, default=864, help="per-class training cap")
    parser.add_argument("--epochs", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roleprobe",
        description="Probe grammatical roles in layered sentence embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="list transitive clauses and role labels")
    p.add_argument("--treebank", required=True)
    p.add_argument("--out", required=True, help="clause table (JSON)")
    p.add_argument("--texts-out", help="sentence texts as JSON lines {id, text}")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("perturb", help="write a perturbed corpus with a sidecar")
    psub = p.add_subparsers(dest="mode", required=True)
    ps = psub.add_parser("swap", help="swap clause arguments")
    ps.add_argument("--treebank", required=True)
    ps.add_argument("--out", required=True, help="output directory")
    ps.set_defaults(func=cmd_perturb_swap)
    pc = psub.add_parser("scramble", help="bounded local scrambles")
    pc.add_argument("--treebank", required=True)
    pc.add_argument("--out", required=True, help="output directory")
    pc.add_argument("--max-displacement", type=int, default=2)
    pc.add_argument("--seed", type=int, default=0)
    pc.set_defaults(func=cmd_perturb_scramble)

    p = sub.add_parser("mock-embed", help="embed a treebank with the mock backend")
    p.add_argument("--treebank", required=True)
    p.add_argument("--out", required=True, help="archive directory")
    p.add_argument("--layers", type=int, default=6, help="hidden layer count")
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_mock_embed)

    p = sub.add_parser("import-archive", help="validate an embedding archive")
    p.add_argument("--archive", required=True)
    p.set_defaults(func=cmd_import_archive)

    p = sub.add_parser("train", help="train one probe per archive layer")
    p.add_argument("--treebank", required=True)
    p.add_argument("--archive", required=True)
    p.add_argument("--out", required=True, help="probe directory")
    p.add_argument("--layer-names", help="comma-separated subset of layers")
    _add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("exp1", help="natural-order probing with prototypicality split")
    p.add_argument("--train-treebank", required=True)
    p.add_argument("--train-archive", required=True)
    p.add_argument("--eval-treebank", required=True)
    p.add_argument("--eval-archive", required=True)
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--probes-out", help="also save the trained probes here")
    _add_train_flags(p)
    p.set_defaults(func=cmd_exp1)

    p = sub.add_parser("exp2", help="argument-swap evaluation with saved probes")
    p.add_argument("--probes", required=True, help="probe directory from exp1/train")
    p.add_argument("--eval-treebank", required=True)
    p.add_argument("--eval-archive", required=True)
    p.add_argument("--swapped-archive", required=True)
    p.add_argument("--out", required=True)
    _add_train_flags(p)
    p.set_defaults(func=cmd_exp2)

    p = sub.add_parser("exp3", help="scrambled-order probing (retrains probes)")
    p.add_argument("--train-treebank", required=True, help="scrambled training corpus")
    p.add_argument("--train-archive", required=True)
    p.add_argument("--eval-treebank", required=True, help="scrambled eval corpus")
    p.add_argument("--eval-archive", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--probes-out")
    _add_train_flags(p)
    p.set_defaults(func=cmd_exp3)

    p = sub.add_parser("report", help="render CSV and SVG charts from a JSON report")
    p.add_argument("--report", required=True, help="report JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_report)

    return parser


def cmd_extract(args) -> int:
    sentences = load_treebank(args.treebank)
    table = []
    for sentence in sentences:
        roles = {
            str(idx): role.value
            for idx, role in sorted(label_roles(sentence).items())
        }
        clauses = []
        for clause in find_transitive_clauses(sentence):
            eligible, failures = swap_eligible(clause, sentence)
            clauses.append(
                {
                    "verb_index": clause.verb_index,
                    "subj_index": clause.subj_index,
                    "obj_index": clause.obj_index,
                    "subj_form": sentence.token(clause.subj_index).form,
                    "obj_form": sentence.token(clause.obj_index).form,
                    "swap_eligible": eligible,
                    "failures": list(failures),
                }
            )
        table.append(
            {"id": sentence.id, "text": sentence.text, "roles": roles, "clauses": clauses}
        )
    Path(args.out).write_text(
        json.dumps({"sentences": table}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    if args.texts_out:
        with open(args.texts_out, "w", encoding="utf-8") as handle:
            for sentence in sentences:
                handle.write(
                    json.dumps({"id": sentence.id, "text": sentence.text}) + "\n"
                )
    n_clauses = sum(len(entry["clauses"]) for entry in table)
    print(f"extract: {len(sentences)} sentences, {n_clauses} transitive clauses")
    return 0


def cmd_perturb_swap(args) -> int:
    sentences = load_treebank(args.treebank)
    pairs = swap_corpus(sentences)
    write_swapped_corpus(pairs, args.out)
    print(f"perturb swap: {len(pairs)} pairs -> {args.out}")
    return 0


def cmd_perturb_scramble(args) -> int:
    sentences = load_treebank(args.treebank)
    scrambles = scramble_corpus(sentences, k=args.max_displacement, global_seed=args.seed)
    write_scrambled_corpus(scrambles, args.out, args.max_displacement)
    print(f"perturb scramble: {len(scrambles)} sentences -> {args.out}")
    return 0


def cmd_mock_embed(args) -> int:
    sentences = load_treebank(args.treebank)
    config = MockConfig(
        num_hidden_layers=args.layers, dim=args.dim, seed=args.seed, noise=args.noise
    )
    archive = mock_embed_corpus(sentences, config)
    write_archive(archive, args.out)
    print(
        f"mock-embed: {len(archive.sentences)} sentences, "
        f"{len(archive.layer_names)} layers, dim {archive.dim} -> {args.out}"
    )
    return 0


def cmd_import_archive(args) -> int:
    archive = read_archive(args.archive)
    validate_archive(archive)
    print(
        f"import-archive: ok, model {archive.model_name!r}, "
        f"{len(archive.layer_names)} layers, dim {archive.dim}, "
        f"{len(archive.sentences)} sentences"
    )
    return 0


def _run_config(args) -> RunConfig:
    return RunConfig(cap=args.cap, epochs=args.epochs, seed=args.seed)


def _save_probes(probes, cfg: RunConfig, out_dir: str) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    train_cfg = TrainConfig(
        epochs=cfg.epochs, learning_rate=cfg.learning_rate,
        batch_size=cfg.batch_size, seed=cfg.seed,
    )
    for name, model in probes.items():
        save_probe(model, train_cfg, out / f"layer-{name}")


def _load_probes(probes_dir: str, layer_names) -> dict:
    probes = {}
    for name in layer_names:
        model, _ = load_probe(Path(probes_dir) / f"layer-{name}")
        probes[name] = model
    return probes


def _write_report(reports, out_dir: str) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_json(reports, out / "report.json")
    write_csv(reports, out / "report.csv")
    for report in reports:
        write_svg(report, "accuracy", out / f"{report.experiment}-accuracy.svg")
        write_svg(
            report,
            "mean_subject_probability",
            out / f"{report.experiment}-probability.svg",
        )


def cmd_train(args) -> int:
    sentences = load_treebank(args.treebank)
    archive = read_archive(args.archive)
    cfg = _run_config(args)
    trained = train_layerwise_probes(sentences, archive, cfg)
    wanted = (
        args.layer_names.split(",") if args.layer_names else list(trained)
    )
    probes = {name: trained[name][0] for name in wanted}
    _save_probes(probes, cfg, args.out)
    print(f"train: {len(probes)} probes -> {args.out}")
    return 0


def cmd_exp1(args) -> int:
    train_sentences = load_treebank(args.train_treebank)
    eval_sentences = load_treebank(args.eval_treebank)
    train_archive = read_archive(args.train_archive)
    eval_archive = read_archive(args.eval_archive)
    cfg = _run_config(args)
    report, probes, instances = run_experiment1(
        train_sentences, train_archive, eval_sentences, eval_archive, cfg
    )
    if args.probes_out:
        _save_probes(probes, cfg, args.probes_out)
    _write_report([report], args.out)
    print(f"exp1: {len(instances)} eval instances -> {args.out}")
    return 0


def cmd_exp2(args) -> int:
    eval_sentences = load_treebank(args.eval_treebank)
    eval_archive = read_archive(args.eval_archive)
    swapped_archive = read_archive(args.swapped_archive)
    probes = _load_probes(args.probes, eval_archive.layer_names)
    pairs = build_swap_pairs(eval_sentences)
    cfg = _run_config(args)
    report, instances = run_experiment2(
        probes, pairs, eval_archive, swapped_archive, cfg
    )
    _write_report([report], args.out)
    print(f"exp2: {len(pairs)} pairs -> {args.out}")
    return 0


def cmd_exp3(args) -> int:
    train_sentences = load_treebank(args.train_treebank)
    eval_sentences = load_treebank(args.eval_treebank)
    train_archive = read_archive(args.train_archive)
    eval_archive = read_archive(args.eval_archive)
    cfg = _run_config(args)
    report, probes, instances = run_experiment3(
        train_sentences, train_archive, eval_sentences, eval_archive, cfg
    )
    if args.probes_out:
        _save_probes(probes, cfg, args.probes_out)
    _write_report([report], args.out)
    print(f"exp3: {len(instances)} eval instances -> {args.out}")
    return 0


def cmd_report(args) -> int:
    reports = read_json(args.report)
    _write_report(reports, args.out)
    print(f"report: {len(reports)} experiments -> {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RoleProbeError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
