"""Proactive retrieval-based conversation engine.

Detects conversational stalemates, expands context entities through a
knowledge graph, retrieves candidate replies, and reranks them with an
alternating PageRank / bipartite-propagation random-walk solver.
"""

from icebreaker.evaluation import (
    LabeledCandidate,
    LabeledInstance,
    MetricReport,
    compute_metrics,
    load_instances,
    run_eval,
)
from icebreaker.kg import EntityGraph, KgLoadError, extract_entities, load_kg, related_entities
from icebreaker.pipeline import (
    ConversationSession,
    NoReplyError,
    PatternSet,
    Resources,
    ResponseTrace,
    detect_stalemate,
    respond,
)
from icebreaker.ranking import (
    ConvergenceError,
    InvalidMatrixError,
    RankedList,
    RankParams,
    RerankState,
    bi_pagerank_hits,
    build_rerank_state,
    co_hits_solve,
    column_normalize,
    compute_priors,
    hits_weight_matrix,
    pagerank_solve,
    rank_baseline,
    rank_with_method,
)
from icebreaker.retrieval import (
    CandidateSet,
    CorpusIndex,
    QueryReplyPair,
    RetrievalCaps,
    build_index,
    load_corpus,
    retrieve_candidates,
)
from icebreaker.textscore import CorpusStats, relevance_phi, similarity, tokenize

__version__ = "0.1.0"

__all__ = [
    "CandidateSet",
    "ConversationSession",
    "ConvergenceError",
    "CorpusIndex",
    "CorpusStats",
    "EntityGraph",
    "InvalidMatrixError",
    "KgLoadError",
    "LabeledCandidate",
    "LabeledInstance",
    "MetricReport",
    "NoReplyError",
    "PatternSet",
    "QueryReplyPair",
    "RankParams",
    "RankedList",
    "RerankState",
    "Resources",
    "ResponseTrace",
    "RetrievalCaps",
    "bi_pagerank_hits",
    "build_index",
    "build_rerank_state",
    "co_hits_solve",
    "column_normalize",
    "compute_metrics",
    "compute_priors",
    "detect_stalemate",
    "extract_entities",
    "hits_weight_matrix",
    "load_corpus",
    "load_instances",
    "load_kg",
    "pagerank_solve",
    "rank_baseline",
    "rank_with_method",
    "related_entities",
    "relevance_phi",
    "respond",
    "retrieve_candidates",
    "run_eval",
    "similarity",
    "tokenize",
]
