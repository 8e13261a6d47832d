"""Orbit-resolved subgraph adjacency counting and PMI graph embeddings."""

__version__ = "0.1.0"

from .graphlets import (
    CANONICAL_KEYS,
    MULTIPLICITY,
    ORDERED_KEYS,
    RW3_SEEN,
    TEMPLATES,
    format_key,
    parse_key,
)

__all__ = [
    "__version__",
    "CANONICAL_KEYS",
    "MULTIPLICITY",
    "ORDERED_KEYS",
    "RW3_SEEN",
    "TEMPLATES",
    "format_key",
    "parse_key",
]
