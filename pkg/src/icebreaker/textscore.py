"""Tokenization and lexical scoring for short conversational texts.

Two scores are exposed: ``similarity`` (cosine over tf-idf, in [0, 1]) drives
graph construction and retrieval, and ``relevance_phi`` (a blend of cosine and
token-set overlap squeezed into the open interval (0, 1)) stands in for a
learned query/reply relevance model. Both are pure functions of their inputs
plus an immutable :class:`CorpusStats` snapshot, so identical inputs always
produce identical scores.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

# Contiguous runs of CJK ideographs carry no whitespace, so they are split
# into overlapping character bigrams; a lone ideograph is kept as is. All
# other text splits on whitespace and punctuation. The word class must
# exclude the CJK range explicitly or a mixed run like "abc天" would be
# swallowed whole.
_CJK_RANGE = "一-鿿"
_TOKEN_RE = re.compile(rf"(?P<cjk>[{_CJK_RANGE}]+)|(?P<word>[^\W_{_CJK_RANGE}]+)")


def tokenize(text: str) -> list[str]:
    """Lowercased, punctuation-free tokens; CJK runs become char bigrams."""
    tokens: list[str] = []
    for match in _TOKEN_RE.finditer(text.lower()):
        run = match.group("cjk")
        if run is None:
            tokens.append(match.group("word"))
        elif len(run) == 1:
            tokens.append(run)
        else:
            tokens.extend(run[i : i + 2] for i in range(len(run) - 1))
    return tokens


@dataclass(frozen=True)
class CorpusStats:
    """Document frequencies over a fixed corpus snapshot.

    ``doc_count`` is the number of documents the snapshot was built from and
    ``doc_freq`` maps a token to the number of documents containing it. The
    snapshot is immutable: scoring against the same stats is reproducible
    regardless of what the corpus does afterwards.
    """

    doc_count: int
    doc_freq: dict[str, int]

    @classmethod
    def from_texts(cls, texts: Iterable[str]) -> "CorpusStats":
        freq: Counter[str] = Counter()
        count = 0
        for text in texts:
            count += 1
            freq.update(set(tokenize(text)))
        return cls(doc_count=count, doc_freq=dict(freq))

    def idf(self, token: str) -> float:
        # Add-one smoothing keeps unseen tokens finite and every weight > 0.
        return math.log((self.doc_count + 1) / (self.doc_freq.get(token, 0) + 1)) + 1.0


def tfidf_vector(text: str, stats: CorpusStats) -> dict[str, float]:
    """Sparse tf-idf vector; tf is the raw in-text count."""
    counts = Counter(tokenize(text))
    return {token: count * stats.idf(token) for token, count in counts.items()}


def cosine_of_vectors(a: dict[str, float], b: dict[str, float]) -> float:
    if not a or not b:
        return 0.0
    if len(b) < len(a):
        a, b = b, a
    dot = sum(weight * b.get(token, 0.0) for token, weight in a.items())
    if dot == 0.0:
        return 0.0
    norm_a = math.sqrt(sum(w * w for w in a.values()))
    norm_b = math.sqrt(sum(w * w for w in b.values()))
    # Floating point can push the ratio a hair past 1; clamp to the contract.
    return min(1.0, max(0.0, dot / (norm_a * norm_b)))


def similarity(text_a: str, text_b: str, stats: CorpusStats) -> float:
    """Cosine similarity of tf-idf vectors, 0.0 when either side is empty."""
    return cosine_of_vectors(tfidf_vector(text_a, stats), tfidf_vector(text_b, stats))


def relevance_phi(
    query: str, reply: str, stats: CorpusStats, *, epsilon: float = 0.01
) -> float:
    """Query/reply relevance strictly inside (0, 1).

    Averages tf-idf cosine with token-set Jaccard overlap, then squeezes the
    result into [epsilon, 1 - epsilon] so downstream weight matrices never
    contain exact zeros or ones. Symmetric in its two text arguments.
    """
    cos = similarity(query, reply, stats)
    set_q, set_r = set(tokenize(query)), set(tokenize(reply))
    union = set_q | set_r
    jaccard = len(set_q & set_r) / len(union) if union else 0.0
    return epsilon + (1.0 - 2.0 * epsilon) * (0.5 * cos + 0.5 * jaccard)
