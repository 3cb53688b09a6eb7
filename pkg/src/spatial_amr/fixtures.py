"""Golden-fixture harness: every case must extract to its gold and render to its table."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .extract import extract_entry
from .model import SentenceAnnotation, annotation_to_dict, deserialize_annotation, render_table, validate
from .penman import PenmanError, parse_document
from .registry import Registry, seed_registry

__all__ = ["FixtureCase", "CaseResult", "FixtureReport", "default_fixture_dir", "load_cases", "verify_fixtures"]


@dataclass(frozen=True)
class FixtureCase:
    name: str
    sentence: str
    amr: Path
    gold: Path
    golden: Path
    provenance: str


@dataclass(frozen=True)
class CaseResult:
    name: str
    failures: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass(frozen=True)
class FixtureReport:
    cases: tuple[CaseResult, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def render(self) -> str:
        lines = []
        for c in self.cases:
            lines.append(f"{'PASS' if c.passed else 'FAIL'}\t{c.name}")
            lines += [f"\t{f}" for f in c.failures]
        return "\n".join(lines) + "\n"


def default_fixture_dir() -> Path:
    """``fixtures/`` of the source checkout, else of the working directory."""
    here = Path(__file__).resolve().parents[2] / "fixtures"
    return here if here.is_dir() else Path.cwd() / "fixtures"


def load_cases(root: Path) -> list[FixtureCase]:
    raw = json.loads((root / "cases.json").read_text(encoding="utf-8"))
    return [FixtureCase(c["name"], c["sentence"], root / c["amr"], root / c["gold"], root / c["golden"],
                        c.get("provenance", "")) for c in raw]


def _diff(got: SentenceAnnotation, gold: SentenceAnnotation) -> list[str]:
    """Slot-level differences, e.g. ``c2.trajector: got ... expected ...``."""
    a, b = annotation_to_dict(got), annotation_to_dict(gold)
    out = []
    if a["entities"] != b["entities"]:
        out.append(f"entities: got {a['entities']} expected {b['entities']}")
    if len(a["configurations"]) != len(b["configurations"]):
        out.append(f"configurations: got {len(a['configurations'])} expected {len(b['configurations'])}")
    for ca, cb in zip(a["configurations"], b["configurations"]):
        for slot in cb:
            if ca.get(slot) != cb.get(slot):
                out.append(f"{cb['id']}.{slot}: got {ca.get(slot)} expected {cb.get(slot)}")
    for key in ("sentence_id", "text"):
        if a[key] != b[key]:
            out.append(f"{key}: got {a[key]!r} expected {b[key]!r}")
    return out


def _check(case: FixtureCase, registry: Registry) -> list[str]:
    failures = []
    if not case.provenance.strip():
        failures.append("no provenance note")
    for label, path in (("AMR", case.amr), ("gold", case.gold), ("golden table", case.golden)):
        if not path.is_file():
            failures.append(f"missing {label} file {path}")
    if failures:
        return failures
    gold = deserialize_annotation(case.gold.read_text(encoding="utf-8"))
    violations = validate(gold)
    if violations:
        failures += [f"gold violates {v.code}: {v.message}" for v in violations]
    try:
        entries = parse_document(case.amr.read_text(encoding="utf-8"))
    except PenmanError as err:
        return failures + [f"AMR does not parse: {err}"]
    if len(entries) != 1:
        return failures + [f"expected one AMR in {case.amr.name}, found {len(entries)}"]
    result = extract_entry(entries[0], registry)
    failures += _diff(result.annotation, gold)
    if not violations and render_table(gold) != case.golden.read_text(encoding="utf-8"):
        failures.append("render_table(gold) differs from the golden table")
    return failures


def verify_fixtures(root: str | Path | None = None, registry: Registry | None = None) -> FixtureReport:
    """Run every case in ``cases.json``; problems become report entries, never exceptions."""
    root = Path(root) if root is not None else default_fixture_dir()
    registry = registry or seed_registry()
    try:
        cases = load_cases(root)
    except (OSError, json.JSONDecodeError, KeyError) as err:
        return FixtureReport((CaseResult("cases.json", (f"cannot read case list: {err}",)),))
    results = []
    for case in cases:
        try:
            failures = _check(case, registry)
        except Exception as err:  # a broken case must not hide the others
            failures = [f"{type(err).__name__}: {err}"]
        results.append(CaseResult(case.name, tuple(failures)))
    return FixtureReport(tuple(results))
