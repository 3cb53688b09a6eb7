"""Spatial AMR toolkit: Penman I/O, spatial roleset registry, configuration
extraction, RCC8 reasoning and triple-based scoring."""

from .extract import (
    ExtractionResult,
    ExtractionWarning,
    Trigger,
    collect_entities,
    detect_triggers,
    extract,
    extract_entry,
)
from .model import (
    SentenceAnnotation,
    SpatialConfiguration,
    SpatialEntity,
    deserialize_annotation,
    render_table,
    serialize_annotation,
    validate,
)
from .penman import AmrGraph, parse_document, parse_graph, print_graph
from .registry import Registry, load_registry, seed_registry
from .scorer import score, score_corpus, to_triples

__version__ = "0.1.0"

__all__ = [
    "AmrGraph",
    "ExtractionResult",
    "ExtractionWarning",
    "Registry",
    "SentenceAnnotation",
    "SpatialConfiguration",
    "SpatialEntity",
    "Trigger",
    "collect_entities",
    "deserialize_annotation",
    "detect_triggers",
    "extract",
    "extract_entry",
    "load_registry",
    "parse_document",
    "parse_graph",
    "print_graph",
    "render_table",
    "score",
    "score_corpus",
    "seed_registry",
    "serialize_annotation",
    "to_triples",
    "validate",
]
