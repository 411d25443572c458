"""Conversation sessions and the proactive response pipeline.

A response to an incoming human utterance follows one of two paths. When the
utterance looks like a conversational stalemate (a filler like "Errr" that
carries no content) and the recent turns mention entities known to the
knowledge graph, the engine proactively introduces content: it expands the
mentioned entities through the graph, retrieves replies containing them, and
reranks those with the full alternating random-walk solver. Otherwise it
stays passive and answers with the best lexically-matching reply overall.
Every response carries a trace recording which path ran and why.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from icebreaker import data as default_data
from icebreaker.kg import EntityGraph, extract_entities, load_kg, related_entities
from icebreaker.ranking import (
    RankedList,
    RankParams,
    bi_pagerank_hits,
    build_rerank_state,
    rank_baseline,
)
from icebreaker.retrieval import (
    GENERAL,
    INTRODUCING,
    CandidateSet,
    CorpusIndex,
    RetrievalCaps,
    build_index,
    load_corpus,
    retrieve_candidates,
)

CONTEXT_WINDOW = 4  # two full turns
EXPANSION_K = 5

HUMAN = "human"
COMPUTER = "computer"


class PatternLoadError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class NoReplyError(RuntimeError):
    """Both retrieval paths came back empty; carries the partial trace."""

    def __init__(self, trace: "ResponseTrace"):
        super().__init__("no candidate reply available for this utterance")
        self.trace = trace


@dataclass(frozen=True)
class Utterance:
    speaker: str
    text: str
    turn: int


@dataclass
class ConversationSession:
    """Ordered utterances of one conversation."""

    id: str
    utterances: list[Utterance] = field(default_factory=list)

    def append(self, speaker: str, text: str) -> Utterance:
        utterance = Utterance(speaker, text, len(self.utterances))
        self.utterances.append(utterance)
        return utterance

    def window(self, size: int = CONTEXT_WINDOW) -> list[str]:
        """Texts of the most recent ``size`` utterances, oldest first."""
        return [u.text for u in self.utterances[-size:]]


@dataclass(frozen=True)
class PatternSet:
    """Stalemate filler patterns: exact literals plus anchored regexes."""

    literals: tuple[str, ...]
    regexes: tuple[re.Pattern, ...]

    @classmethod
    def from_file(cls, path: str | Path) -> "PatternSet":
        """One pattern per line; ``re:`` prefixes a regex, ``#`` a comment.

        Literals match the whole trimmed utterance case-insensitively;
        regexes must match the whole trimmed utterance too (fullmatch,
        case-insensitive). A regex that fails to compile raises
        :class:`PatternLoadError` with its line number.
        """
        literals: list[str] = []
        regexes: list[re.Pattern] = []
        text = Path(path).read_text(encoding="utf-8")
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("re:"):
                try:
                    regexes.append(re.compile(line[3:], re.IGNORECASE))
                except re.error as exc:
                    raise PatternLoadError(f"bad regex {line[3:]!r}: {exc}", line_no)
            else:
                literals.append(line.casefold())
        return cls(tuple(literals), tuple(regexes))

    def matches(self, utterance: str) -> bool:
        trimmed = utterance.strip()
        if trimmed.casefold() in self.literals:
            return True
        return any(rx.fullmatch(trimmed) for rx in self.regexes)


def detect_stalemate(patterns: PatternSet, utterance: str) -> bool:
    """True when the utterance is pure filler by the configured patterns."""
    return patterns.matches(utterance)


@dataclass(frozen=True)
class Resources:
    """Everything the pipeline needs, loaded once and shared read-only."""

    index: CorpusIndex
    graph: EntityGraph
    patterns: PatternSet
    params: RankParams = RankParams()
    caps: RetrievalCaps = RetrievalCaps()
    context_window: int = CONTEXT_WINDOW
    expansion_k: int = EXPANSION_K

    @classmethod
    def load(
        cls,
        corpus_path: str | Path | None = None,
        kg_path: str | Path | None = None,
        patterns_path: str | Path | None = None,
        params: RankParams | None = None,
        caps: RetrievalCaps | None = None,
    ) -> "Resources":
        """Load from files, falling back to the packaged demo fixtures."""
        corpus_path = corpus_path or default_data.corpus_path()
        kg_path = kg_path or default_data.kg_path()
        patterns_path = patterns_path or default_data.patterns_path()
        return cls(
            index=build_index(load_corpus(corpus_path)),
            graph=load_kg(kg_path),
            patterns=PatternSet.from_file(patterns_path),
            params=params or RankParams(),
            caps=caps or RetrievalCaps(),
        )


@dataclass(frozen=True)
class ResponseTrace:
    """Full account of one response: path taken, evidence, and ranking."""

    mode: str
    stalemate: bool
    context_window: tuple[str, ...]
    detected_entities: tuple[str, ...]
    expanded_entities: tuple[tuple[str, float], ...]
    candidates: tuple[tuple[int, float], ...]
    ranking: RankedList | None
    chosen_reply_id: int | None

    def to_dict(self, index: CorpusIndex | None = None) -> dict:
        """JSON-friendly form; pass the index to inline candidate texts."""
        def text_of(pair_id: int) -> str | None:
            return index.pairs[pair_id].reply_text if index is not None else None

        ranked = []
        if self.ranking is not None:
            for local_id, score in zip(self.ranking.candidate_ids, self.ranking.scores):
                pair_id = self.candidates[local_id][0]
                entry = {"id": pair_id, "score": score}
                if index is not None:
                    entry["text"] = text_of(pair_id)
                ranked.append(entry)
        return {
            "mode": self.mode,
            "stalemate": self.stalemate,
            "context_window": list(self.context_window),
            "detected_entities": list(self.detected_entities),
            "expanded_entities": [
                {"entity": e, "weight": w} for e, w in self.expanded_entities
            ],
            "candidates": [
                {
                    "id": pair_id,
                    "retrieval_score": score,
                    **({"text": text_of(pair_id)} if index is not None else {}),
                }
                for pair_id, score in self.candidates
            ],
            "ranking": {
                "method": self.ranking.method if self.ranking else None,
                "entries": ranked,
                "iterations": [
                    {"mean_square_diff": it.mean_square_diff}
                    for it in (self.ranking.trace if self.ranking else ())
                ],
            },
            "chosen_reply_id": self.chosen_reply_id,
        }


def expand_entities(
    graph: EntityGraph, detected: Sequence[str], k: int = EXPANSION_K
) -> list[tuple[str, float]]:
    """Detected entities (weight 1.0) plus their top-k graph neighbors.

    First occurrence wins on duplicates, so a detected entity keeps weight
    1.0 even when it is also some other entity's neighbor. Order is
    deterministic: detected entities first, then each one's neighbors in
    ranked order.
    """
    expanded: list[tuple[str, float]] = [(e, 1.0) for e in detected]
    seen = set(detected)
    for entity in detected:
        for neighbor, weight in related_entities(graph, entity, k):
            if neighbor not in seen:
                seen.add(neighbor)
                expanded.append((neighbor, weight))
    return expanded


def respond(
    session: ConversationSession, utterance: str, resources: Resources
) -> tuple[str, ResponseTrace]:
    """Append the human utterance, choose a reply, append and return it.

    The proactive path runs only when the utterance is a stalemate filler
    AND the context window mentions at least one known entity AND entity
    retrieval finds something; any miss falls back to the passive path. If
    neither path yields a candidate, :class:`NoReplyError` is raised and the
    session keeps only the human utterance.
    """
    session.append(HUMAN, utterance)
    window = tuple(session.window(resources.context_window))
    stalemate = detect_stalemate(resources.patterns, utterance)

    detected: tuple[str, ...] = ()
    expanded: tuple[tuple[str, float], ...] = ()
    candidates: CandidateSet | None = None
    if stalemate:
        detected = tuple(extract_entities(resources.graph, window))
        if detected:
            expanded = tuple(
                expand_entities(resources.graph, detected, resources.expansion_k)
            )
            introducing = retrieve_candidates(
                resources.index, window, expanded, INTRODUCING, resources.caps
            )
            if introducing.entries:
                candidates = introducing

    if candidates is None:
        general = retrieve_candidates(
            resources.index, window, (), GENERAL, resources.caps
        )
        if not general.entries:
            raise NoReplyError(
                ResponseTrace(
                    mode=GENERAL,
                    stalemate=stalemate,
                    context_window=window,
                    detected_entities=detected,
                    expanded_entities=expanded,
                    candidates=(),
                    ranking=None,
                    chosen_reply_id=None,
                )
            )
        candidates = general

    candidate_texts = [
        resources.index.pairs[pid].reply_text for pid, _ in candidates.entries
    ]
    state = build_rerank_state(list(window), candidate_texts, resources.index.stats)
    if candidates.mode == INTRODUCING:
        ranking = bi_pagerank_hits(state, resources.params)
    else:
        ranking = rank_baseline("textual", state, resources.params)

    chosen_pair_id = candidates.entries[ranking.top()][0]
    reply_text = resources.index.pairs[chosen_pair_id].reply_text
    session.append(COMPUTER, reply_text)
    trace = ResponseTrace(
        mode=candidates.mode,
        stalemate=stalemate,
        context_window=window,
        detected_entities=detected,
        expanded_entities=expanded,
        candidates=candidates.entries,
        ranking=ranking,
        chosen_reply_id=chosen_pair_id,
    )
    return reply_text, trace
