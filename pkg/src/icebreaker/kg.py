"""Directed weighted entity graph: loading, neighbor lookup, text scanning."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable


class KgLoadError(ValueError):
    """A graph file line could not be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class EntityGraph:
    """Adjacency with neighbor lists pre-sorted by weight desc, then name.

    ``vocabulary`` is every entity appearing on either end of an edge;
    ``max_entity_length`` bounds the window used by the substring scanner.
    """

    adjacency: dict[str, tuple[tuple[str, float], ...]]
    vocabulary: frozenset[str]
    max_entity_length: int

    @property
    def entity_count(self) -> int:
        return len(self.vocabulary)


def _build_graph(weights: dict[str, dict[str, float]]) -> EntityGraph:
    adjacency = {
        head: tuple(sorted(out.items(), key=lambda kv: (-kv[1], kv[0])))
        for head, out in weights.items()
    }
    vocabulary = frozenset(weights) | {
        tail for out in weights.values() for tail in out
    }
    max_len = max((len(e) for e in vocabulary), default=0)
    return EntityGraph(adjacency, vocabulary, max_len)


def load_kg(path: str | Path) -> EntityGraph:
    """Parse a tab-separated file of ``head<TAB>tail<TAB>weight`` edges.

    Entities are whitespace-trimmed, weights must be positive numbers, and a
    repeated (head, tail) pair keeps its maximum weight. Any malformed line
    raises :class:`KgLoadError` naming the line. Blank lines are skipped.
    """
    weights: dict[str, dict[str, float]] = {}
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise KgLoadError(
                f"expected 3 tab-separated fields, got {len(fields)}", line_no
            )
        head, tail, raw_weight = (f.strip() for f in fields)
        if not head or not tail:
            raise KgLoadError("empty entity name", line_no)
        try:
            weight = float(raw_weight)
        except ValueError:
            raise KgLoadError(f"weight {raw_weight!r} is not a number", line_no) from None
        if not weight > 0.0:
            raise KgLoadError(f"weight must be positive, got {weight}", line_no)
        out = weights.setdefault(head, {})
        out[tail] = max(weight, out.get(tail, 0.0))
    return _build_graph(weights)


def related_entities(
    graph: EntityGraph, entity: str, k: int = 5
) -> list[tuple[str, float]]:
    """Top-k outgoing neighbors by weight; unknown entities give []."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    return list(graph.adjacency.get(entity, ())[:k])


def extract_entities(graph: EntityGraph, texts: Iterable[str]) -> list[str]:
    """Dictionary scan of the texts against the graph vocabulary.

    At every position the longest vocabulary entry is matched (exact
    substring, no overlaps); results keep first-appearance order with
    duplicates dropped. Deterministic for fixed inputs.
    """
    found: list[str] = []
    seen: set[str] = set()
    if not graph.vocabulary:
        return found
    for text in texts:
        i, n = 0, len(text)
        while i < n:
            match = None
            for length in range(min(graph.max_entity_length, n - i), 0, -1):
                window = text[i : i + length]
                if window in graph.vocabulary:
                    match = window
                    break
            if match is None:
                i += 1
                continue
            if match not in seen:
                seen.add(match)
                found.append(match)
            i += len(match)
    return found
