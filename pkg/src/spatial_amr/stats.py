"""Trigger-frequency statistics: how much of a corpus is spatial vocabulary.

For AMR input a token is a graph node and a trigger is a node whose concept
the registry lists. For plain text, tokens are whitespace-separated words and
triggers are the longest registry surface forms found in them.
"""

from __future__ import annotations

import string
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .penman import AmrDocumentEntry
from .registry import Registry

__all__ = ["StatsReport", "amr_stats", "text_stats"]

_PUNCT = string.punctuation.replace("-", "").replace("_", "")


@dataclass(frozen=True)
class StatsReport:
    tokens: int = 0
    triggers: int = 0
    per_concept: dict[str, int] = field(default_factory=dict)
    unit: str = "node"

    @property
    def ratio(self) -> float:
        return self.triggers / self.tokens if self.tokens else 0.0

    def as_dict(self) -> dict:
        return {"unit": self.unit, "tokens": self.tokens, "triggers": self.triggers,
                "ratio": self.ratio, "per_concept": dict(sorted(self.per_concept.items()))}

    def render(self) -> str:
        lines = [f"{name}\t{count}" for name, count in sorted(self.per_concept.items())]
        lines += [f"triggers\t{self.triggers}", f"tokens ({self.unit}s)\t{self.tokens}",
                  f"ratio\t{self.ratio:.4f}"]
        return "\n".join(lines) + "\n"


def amr_stats(entries: Iterable[AmrDocumentEntry], registry: Registry) -> StatsReport:
    counts: Counter[str] = Counter()
    tokens = 0
    for entry in entries:
        for node in entry.graph.nodes:
            tokens += 1
            if registry.is_spatial_trigger(node.concept):
                entry_ = registry.resolve(node.concept)
                counts[entry_.name] += 1
    return StatsReport(tokens, sum(counts.values()), dict(counts), "node")


def _normalize(token: str) -> str:
    return token.lower().strip(_PUNCT)


def text_stats(lines: Iterable[str], registry: Registry) -> StatsReport:
    forms = registry.surface_forms()
    longest = max((len(k) for k in forms), default=0)
    counts: Counter[str] = Counter()
    tokens = 0
    for line in lines:
        words = line.split()
        tokens += len(words)
        norm = [_normalize(w) for w in words]
        i = 0
        while i < len(norm):
            for n in range(min(longest, len(norm) - i), 0, -1):
                name = forms.get(tuple(norm[i:i + n]))
                if name is not None:
                    counts[name] += 1
                    i += n
                    break
            else:
                i += 1
    return StatsReport(tokens, sum(counts.values()), dict(counts), "word")
