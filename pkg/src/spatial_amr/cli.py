"""Command-line front end.

Exit status: 0 success, 1 unreadable or malformed input, 2 validation failure
(or a dropped configuration) when ``--strict`` is given. Data goes to stdout
or ``--out``; diagnostics go to stderr as ``id<TAB>code<TAB>message`` lines.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

from .extract import ExtractionResult, ExtractionWarning, extract_entry
from .fixtures import verify_fixtures
from .model import SchemaError, SentenceAnnotation, dump_annotations, load_annotations, render_table, validate
from .penman import AmrDocumentEntry, PenmanError, parse_document
from .rcc8 import QtConstraintNetwork, UnknownFMeaning, algebraic_closure, network_from_annotation
from .registry import Registry, RegistryError, load_registry
from .scorer import score_corpus
from .stats import amr_stats, text_stats

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_INPUT, EXIT_INVALID = 0, 1, 2


class _InputError(Exception):
    pass


def _diag(ident: str, code: str, message: str) -> None:
    print(f"{ident}\t{code}\t{message}", file=sys.stderr)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise _InputError(f"cannot read {path}: {err.strerror or err}") from None


def _write(args: argparse.Namespace, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _registry(args: argparse.Namespace) -> Registry:
    return load_registry(args.registry)


# -- extract ------------------------------------------------------------------

_worker_registry: Registry | None = None


def _init_worker(path: str | None) -> None:
    global _worker_registry
    _worker_registry = load_registry(path)


def _slim(result: ExtractionResult) -> tuple[SentenceAnnotation, tuple[ExtractionWarning, ...]]:
    # triggers hold registry entries, which do not pickle
    return result.annotation, result.warnings


def _extract_one(entry: AmrDocumentEntry) -> tuple[SentenceAnnotation, tuple[ExtractionWarning, ...]]:
    return _slim(extract_entry(entry, _worker_registry))


def _run_extraction(entries: list[AmrDocumentEntry], registry_path: str | None,
                    jobs: int) -> list[tuple[SentenceAnnotation, tuple[ExtractionWarning, ...]]]:
    if jobs <= 1 or len(entries) <= 1:
        registry = load_registry(registry_path)
        return [_slim(extract_entry(e, registry)) for e in entries]
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(registry_path,)) as pool:
        # map() yields in submission order whatever the completion order
        return list(pool.map(_extract_one, entries, chunksize=max(1, len(entries) // (jobs * 4))))


def _render_all(annotations, fmt: str) -> str:
    if fmt == "table":
        return "\n".join(render_table(a) for a in annotations)
    return dump_annotations(annotations)


def cmd_extract(args: argparse.Namespace) -> int:
    entries = parse_document(_read(args.input))
    _registry(args)  # fail early on a bad registry
    results = _run_extraction(entries, args.registry, args.jobs)
    status = EXIT_OK
    for entry, (annotation, warnings) in zip(entries, results):
        ident = entry.id or "?"
        for w in warnings:
            _diag(ident, w.code, f"{w.id}: {w.message}")
            if args.strict and w.code == "DroppedConfiguration":
                status = EXIT_INVALID
        for v in validate(annotation):
            _diag(ident, v.code, v.message)
            status = EXIT_INVALID if args.strict else status
    annotations = [a for a, _ in results]
    _write(args, _render_all(annotations, args.format) if annotations else "")
    return status


# -- validate / render --------------------------------------------------------

def cmd_validate(args: argparse.Namespace) -> int:
    annotations = load_annotations(_read(args.input))
    bad = 0
    for a in annotations:
        for v in validate(a):
            bad += 1
            _diag(a.sentence_id, v.code, f"{v.ref}: {v.message}")
    _write(args, f"{len(annotations)} annotation(s), {bad} violation(s)\n")
    return EXIT_INVALID if bad and args.strict else EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    annotations = load_annotations(_read(args.input))
    _write(args, _render_all(annotations, args.format))
    return EXIT_OK


# -- score ---------------------------------------------------------------------

def cmd_score(args: argparse.Namespace) -> int:
    golds = load_annotations(_read(args.gold))
    preds = load_annotations(_read(args.pred))
    report = score_corpus(golds, preds, restarts=args.restarts, seed=args.seed, average=args.average)
    if args.format == "json":
        _write(args, json.dumps(report.as_dict(), indent=2) + "\n")
        return EXIT_OK
    lines = ["sentence\tmatched\tgold\tpred\tP\tR\tF1"]
    for s in report.sentences:
        lines.append(f"{s.sentence_id}\t{s.matched}\t{s.gold_total}\t{s.pred_total}\t"
                     f"{s.precision:.4f}\t{s.recall:.4f}\t{s.f1:.4f}")
    for name, (p, r, f) in (("micro", report.micro), ("macro", report.macro)):
        lines.append(f"{name}\t\t\t\t{p:.4f}\t{r:.4f}\t{f:.4f}")
    lines.append(f"F1 ({report.average})\t{report.f1:.4f}")
    _write(args, "\n".join(lines) + "\n")
    return EXIT_OK


# -- reason --------------------------------------------------------------------

def _networks(text: str) -> list[tuple[str, QtConstraintNetwork]]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"not valid JSON: {err.msg}") from None
    if isinstance(data, dict) and "constraints" in data:
        return [("network", QtConstraintNetwork.from_dict(data))]
    return [(a.sentence_id, network_from_annotation(a)) for a in load_annotations(text)]


def cmd_reason(args: argparse.Namespace) -> int:
    out = []
    for name, net in _networks(_read(args.input)):
        for notice in net.notices:
            _diag(name, "Notice", notice)
        result = algebraic_closure(net)
        if result.consistent:
            out.append(f"{name}: CONSISTENT")
        else:
            x, y = result.witness
            out.append(f"{name}: INCONSISTENT witness {x} {y}")
        for step in result.trace:
            out.append(f"  refine {step}")
        for (x, y), rel in result.network.constraints.items():
            out.append(f"  {x} {y} {rel}")
    _write(args, "\n".join(out) + ("\n" if out else ""))
    return EXIT_OK


# -- stats / verify ---------------------------------------------------------------

def _looks_like_amr(text: str) -> bool:
    return any(line.lstrip().startswith("(") for line in text.splitlines())


def cmd_stats(args: argparse.Namespace) -> int:
    text = _read(args.input)
    kind = args.kind if args.kind != "auto" else ("amr" if _looks_like_amr(text) else "text")
    registry = _registry(args)
    if kind == "amr":
        report = amr_stats(parse_document(text), registry)
    else:
        report = text_stats(text.splitlines(), registry)
    _write(args, json.dumps(report.as_dict(), indent=2) + "\n" if args.format == "json" else report.render())
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    report = verify_fixtures(args.fixtures, _registry(args))
    _write(args, report.render())
    return EXIT_OK if report.passed else EXIT_INVALID


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--registry", metavar="PATH", help="roleset registry file (default: bundled seed)")
    common.add_argument("--out", metavar="PATH", help="write data here instead of stdout")
    common.add_argument("--strict", action="store_true", help="exit 2 on violations or dropped configurations")
    common.add_argument("--seed", type=int, default=0, help="seed for scorer restarts")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes")

    parser = argparse.ArgumentParser(prog="spatial-amr", description="Spatial AMR toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str, fmt: str | None = "json") -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_)
        if fmt:
            p.add_argument("--format", choices=("json", "table"), default=fmt)
        return p

    p = add("extract", "AMR document -> spatial annotations")
    p.add_argument("input")
    p.set_defaults(func=cmd_extract)

    p = add("validate", "check annotation files against the schema rules", None)
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)

    p = add("render", "annotation file -> relational tables", "table")
    p.add_argument("input")
    p.set_defaults(func=cmd_render)

    p = add("score", "triple F1 of predicted against gold annotations", "table")
    p.add_argument("gold")
    p.add_argument("pred")
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--average", choices=("micro", "macro"), default="micro")
    p.set_defaults(func=cmd_score)

    p = add("reason", "RCC8 closure of a network file or of annotations' topological QTs", None)
    p.add_argument("input")
    p.set_defaults(func=cmd_reason)

    p = add("stats", "trigger counts and trigger/token ratio", "table")
    p.add_argument("input")
    p.add_argument("--kind", choices=("auto", "amr", "text"), default="auto")
    p.set_defaults(func=cmd_stats)

    p = add("verify", "run the golden fixture cases", None)
    p.add_argument("fixtures", nargs="?", default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PenmanError as err:
        _diag(err.entry_id or "?", err.code, str(err))
    except SchemaError as err:
        _diag("?", "SchemaError", str(err))
    except (RegistryError, UnknownFMeaning) as err:
        _diag("?", type(err).__name__, str(err))
    except _InputError as err:
        _diag("?", "InputError", str(err))
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
