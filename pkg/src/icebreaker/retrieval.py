"""Candidate reply retrieval over a query/reply corpus.

The index stores the corpus pairs, an inverted token index over both the
query and reply sides, pre-tokenized reply vectors, and the corpus
statistics that every lexical score downstream is computed against. Each
corpus pair contributes its query text and its reply text as two separate
documents to those statistics.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from icebreaker.textscore import CorpusStats, cosine_of_vectors, tfidf_vector, tokenize

INTRODUCING = "introducing"
GENERAL = "general"


class CorpusLoadError(ValueError):
    """A corpus file line could not be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class QueryReplyPair:
    id: int
    query_text: str
    reply_text: str


@dataclass(frozen=True)
class RetrievalCaps:
    """Limits applied during retrieval.

    per_entity   candidates kept per matched entity (introducing mode)
    total        overall candidate budget per retrieval call
    min_len      minimum reply length in tokens; shorter replies are dropped
    """

    per_entity: int = 10
    total: int = 50
    min_len: int = 3

    def __post_init__(self):
        if self.per_entity < 1 or self.total < 1 or self.min_len < 0:
            raise ValueError(f"invalid retrieval caps {self}")


@dataclass(frozen=True)
class CandidateSet:
    """Retrieved (pair_id, score) entries, best first, plus the mode used."""

    entries: tuple[tuple[int, float], ...]
    mode: str

    def pair_ids(self) -> tuple[int, ...]:
        return tuple(pid for pid, _ in self.entries)


@dataclass(frozen=True)
class CorpusIndex:
    pairs: tuple[QueryReplyPair, ...]
    stats: CorpusStats
    query_postings: dict[str, tuple[int, ...]]
    reply_postings: dict[str, tuple[int, ...]]
    reply_vectors: tuple[dict[str, float], ...]
    reply_token_counts: tuple[int, ...]

    def postings(self, token: str, side: str = "reply") -> tuple[int, ...]:
        table = self.reply_postings if side == "reply" else self.query_postings
        return table.get(token, ())


def load_corpus(path: str | Path) -> list[QueryReplyPair]:
    """Read ``query<TAB>reply`` lines, assigning dense ids in file order."""
    pairs: list[QueryReplyPair] = []
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise CorpusLoadError(
                f"expected 2 tab-separated fields, got {len(fields)}", line_no
            )
        query_text, reply_text = fields[0].strip(), fields[1].strip()
        if not query_text or not reply_text:
            raise CorpusLoadError("empty query or reply text", line_no)
        pairs.append(QueryReplyPair(len(pairs), query_text, reply_text))
    return pairs


def build_index(pairs: Sequence[QueryReplyPair]) -> CorpusIndex:
    """Single pass over the pairs: postings, stats, and cached reply vectors."""
    if not pairs:
        raise ValueError("cannot index an empty corpus")
    ids = [p.id for p in pairs]
    if sorted(ids) != list(range(len(pairs))):
        raise ValueError("pair ids must be unique and dense from 0")

    query_postings: dict[str, list[int]] = {}
    reply_postings: dict[str, list[int]] = {}
    documents: list[str] = []
    for pair in pairs:
        documents.append(pair.query_text)
        documents.append(pair.reply_text)
        for token in set(tokenize(pair.query_text)):
            query_postings.setdefault(token, []).append(pair.id)
        for token in set(tokenize(pair.reply_text)):
            reply_postings.setdefault(token, []).append(pair.id)

    stats = CorpusStats.from_texts(documents)
    ordered = sorted(pairs, key=lambda p: p.id)
    return CorpusIndex(
        pairs=tuple(ordered),
        stats=stats,
        query_postings={t: tuple(sorted(ps)) for t, ps in query_postings.items()},
        reply_postings={t: tuple(sorted(ps)) for t, ps in reply_postings.items()},
        reply_vectors=tuple(tfidf_vector(p.reply_text, stats) for p in ordered),
        reply_token_counts=tuple(len(tokenize(p.reply_text)) for p in ordered),
    )


def _context_vector(index: CorpusIndex, context_texts: Sequence[str]) -> dict[str, float]:
    return tfidf_vector(" ".join(context_texts), index.stats)


def _rank_entries(scored: Iterable[tuple[int, float]], limit: int):
    # Best score first; equal scores resolve to the lower pair id.
    return tuple(sorted(scored, key=lambda e: (-e[1], e[0]))[:limit])


def retrieve_candidates(
    index: CorpusIndex,
    context_texts: Sequence[str],
    entities: Sequence[tuple[str, float]],
    mode: str,
    caps: RetrievalCaps = RetrievalCaps(),
) -> CandidateSet:
    """Retrieve candidate replies for a conversation context.

    Introducing mode requires a nonempty entity list: for each entity, the
    replies containing it verbatim are scored by similarity to the joined
    context, the best ``per_entity`` kept, and the per-entity lists merged by
    maximum score before the overall ``total`` cut. General mode scores every
    reply against the context. Replies shorter than ``min_len`` tokens are
    dropped in both modes. Scores ties break toward lower pair ids, so the
    result is deterministic.
    """
    if mode not in (INTRODUCING, GENERAL):
        raise ValueError(f"unknown retrieval mode {mode!r}")
    context = _context_vector(index, context_texts)

    def score(pair_id: int) -> float:
        return cosine_of_vectors(index.reply_vectors[pair_id], context)

    eligible = [
        p for p in index.pairs if index.reply_token_counts[p.id] >= caps.min_len
    ]
    if mode == GENERAL:
        scored = ((p.id, score(p.id)) for p in eligible)
        return CandidateSet(_rank_entries(scored, caps.total), GENERAL)

    if not entities:
        raise ValueError("introducing mode needs at least one entity")
    best: dict[int, float] = {}
    for entity, _weight in entities:
        matching = [p.id for p in eligible if entity in p.reply_text]
        top = _rank_entries(((pid, score(pid)) for pid in matching), caps.per_entity)
        for pid, s in top:
            if s > best.get(pid, -1.0):
                best[pid] = s
    return CandidateSet(_rank_entries(best.items(), caps.total), INTRODUCING)
