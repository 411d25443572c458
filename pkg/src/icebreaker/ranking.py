"""Random-walk reranking over a query/reply bipartite graph.

The reranker treats the recent conversation turns as one node set (queries)
and the retrieved candidate replies as the other (replies). Three coupled
mechanisms produce the final candidate scores:

* a damped PageRank with a restart prior, run separately over the
  query-query and reply-reply similarity graphs;
* prior-weighted bipartite weight matrices, where each directed edge
  query->reply (or reply->query) is the lexical relevance of the pair scaled
  by the source node's PageRank score;
* a coupled hub/authority propagation across the bipartite graph that mixes
  walked-in mass with fixed textual priors.

The alternating solver feeds each side's propagation scores back in as the
other side's PageRank prior and repeats until the concatenated hub/authority
vector stops moving. Final candidate order is by authority score.

All functions are pure: they never mutate their inputs and identical inputs
give bit-identical outputs.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from icebreaker.textscore import CorpusStats, relevance_phi, similarity

QUERY_TO_REPLY = "query_to_reply"
REPLY_TO_QUERY = "reply_to_query"

BASELINE_METHODS = ("textual", "reply_pagerank", "hits", "co_hits")
ALL_METHODS = BASELINE_METHODS + ("bi_pagerank_hits",)


class InvalidMatrixError(ValueError):
    """Raised when a matrix or vector violates a shape or sign contract."""


class ConvergenceError(RuntimeError):
    """An iteration hit its step budget before meeting its tolerance.

    Carries the last residual and iterate(s) so callers can inspect how far
    the computation got.
    """

    def __init__(self, message: str, *, residual: float, last=None, trace=None):
        super().__init__(f"{message} (last mean-square step {residual:.3e})")
        self.residual = residual
        self.last = last
        self.trace = trace


@dataclass(frozen=True)
class RankParams:
    """Knobs for the random-walk solvers.

    mu             restart weight of the PageRank prior
    alpha_x        walked-in mass fraction for the query-side update
    alpha_y        walked-in mass fraction for the reply-side update
    local_tol      mean-square step tolerance for inner fixed-point loops
    global_tol     mean-square step tolerance for the alternating outer loop
    """

    mu: float = 0.15
    alpha_x: float = 0.3
    alpha_y: float = 1.0
    local_tol: float = 1e-9
    global_tol: float = 1e-6
    max_local_iters: int = 1000
    max_global_iters: int = 100

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu must lie in [0, 1], got {self.mu}")
        for name in ("alpha_x", "alpha_y"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        for name in ("local_tol", "global_tol"):
            value = getattr(self, name)
            if not value > 0.0:
                raise ValueError(f"{name} must be positive, got {value}")
        for name in ("max_local_iters", "max_global_iters"):
            value = getattr(self, name)
            if not (isinstance(value, int) and value >= 1):
                raise ValueError(f"{name} must be a positive integer, got {value}")


def mean_square_diff(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.mean((np.asarray(a, float) - np.asarray(b, float)) ** 2))


def uniform_scores(n: int) -> np.ndarray:
    if n < 1:
        raise InvalidMatrixError("score vector needs at least one entry")
    return np.full(n, 1.0 / n)


def score_vector(values) -> np.ndarray:
    """Validate and normalize a nonnegative vector to sum exactly to 1."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise InvalidMatrixError("score vector must be 1-d and nonempty")
    if np.any(v < 0.0) or not np.all(np.isfinite(v)):
        raise InvalidMatrixError("score vector entries must be finite and >= 0")
    total = v.sum()
    if total <= 0.0:
        raise InvalidMatrixError("score vector must have positive mass")
    return v / total


def column_normalize(matrix) -> np.ndarray:
    """Scale every column to sum to 1; all-zero columns become uniform.

    A zero column carries no signal about where its mass should go, so it is
    replaced by a uniform distribution instead of dividing by zero. Negative
    entries are rejected. The input is never modified.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise InvalidMatrixError("expected a nonempty 2-d matrix")
    if np.any(m < 0.0) or not np.all(np.isfinite(m)):
        raise InvalidMatrixError("matrix entries must be finite and >= 0")
    sums = m.sum(axis=0)
    zero = sums <= 0.0
    out = m / np.where(zero, 1.0, sums)
    if np.any(zero):
        out[:, zero] = 1.0 / m.shape[0]
    return out


def pagerank_solve(sim, prior, params: RankParams | None = None) -> np.ndarray:
    """Damped PageRank over a similarity graph with a restart prior.

    The transition matrix is the column-normalized product Diag(prior) @ sim.T,
    so a node's outgoing mass is weighted both by edge similarity and by the
    prior of the node being walked to. Each step mixes one walk step with a
    restart: v <- (1 - mu) * T v + mu * prior. Iteration starts from the prior
    and stops when the mean-square step drops below ``local_tol``.

    With mu = 1 the walk term vanishes and the prior is returned unchanged.
    """
    params = params or RankParams()
    m = np.asarray(sim, dtype=float)
    p = np.asarray(prior, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidMatrixError(f"similarity matrix must be square, got shape {m.shape}")
    if p.shape != (m.shape[0],):
        raise InvalidMatrixError(
            f"prior length {p.shape} does not match matrix of shape {m.shape}"
        )
    transition = column_normalize(p[:, None] * m.T)
    v = p.copy()
    residual = float("inf")
    for _ in range(params.max_local_iters):
        nxt = (1.0 - params.mu) * (transition @ v) + params.mu * p
        residual = mean_square_diff(nxt, v)
        v = nxt
        if residual < params.local_tol:
            return v
    raise ConvergenceError(
        "stationary-score iteration did not converge", residual=residual, last=v
    )


def hits_weight_matrix(relevance, source_scores, direction: str) -> np.ndarray:
    """Bipartite weight matrix: relevance rows scaled by source-node scores.

    ``relevance`` must be oriented with rows = source side for the given
    direction (queries for query->reply, replies for reply->query). Entry
    (i, j) of the result is relevance[i, j] * source_scores[i], leaving the
    source node's score imprinted on all of its outgoing edges. No
    normalization happens here.
    """
    if direction not in (QUERY_TO_REPLY, REPLY_TO_QUERY):
        raise ValueError(f"unknown direction {direction!r}")
    rel = np.asarray(relevance, dtype=float)
    scores = np.asarray(source_scores, dtype=float)
    if rel.ndim != 2 or rel.size == 0:
        raise InvalidMatrixError("relevance must be a nonempty 2-d matrix")
    if scores.shape != (rel.shape[0],):
        raise InvalidMatrixError(
            f"need one source score per row: {scores.shape} vs {rel.shape}"
        )
    return scores[:, None] * rel


def compute_priors(sim_qr) -> tuple[np.ndarray, np.ndarray]:
    """Textual priors from a query x reply similarity matrix.

    A query's prior is proportional to its mean similarity over all replies,
    and a reply's to its mean over all queries; each side is normalized to
    sum to 1. A side whose similarities are all zero gets a uniform prior.
    """
    m = np.asarray(sim_qr, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise InvalidMatrixError("similarity matrix must be 2-d and nonempty")
    if np.any(m < 0.0):
        raise InvalidMatrixError("similarities must be >= 0")

    def normalize(v: np.ndarray) -> np.ndarray:
        total = v.sum()
        if total <= 0.0:
            return np.full(v.shape, 1.0 / v.size)
        return v / total

    return normalize(m.mean(axis=1)), normalize(m.mean(axis=0))


def _cross_transitions(
    query_to_reply_w: np.ndarray, reply_to_query_w: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Build the two cross-side transition matrices for the coupled update.

    Each directed weight matrix carries its source side's scores as row
    scaling. Column-normalizing the raw matrix keeps that row scaling alive
    inside every column; normalizing the transpose directly would cancel it,
    because the scale factor is constant along a transposed column. So each
    cross transition is: column-normalize first, then transpose, then
    column-normalize again to make the columns proper distributions.
    """
    to_query = column_normalize(column_normalize(reply_to_query_w).T)
    to_reply = column_normalize(column_normalize(query_to_reply_w).T)
    return to_query, to_reply


def co_hits_solve(
    query_to_reply_w,
    reply_to_query_w,
    query_prior,
    reply_prior,
    params: RankParams | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Coupled hub/authority fixed point over the bipartite graph.

    Jacobi iteration of

        x <- alpha_x * T_q y + (1 - alpha_x) * query_prior
        y <- alpha_y * T_r x + (1 - alpha_y) * reply_prior

    where T_q and T_r are the cross-side transitions from
    :func:`_cross_transitions`. Both updates read the previous (x, y) pair;
    iteration starts from the priors and stops when the mean-square step of
    the concatenated (x, y) drops below ``local_tol``. With alpha_x =
    alpha_y = 0 the priors are returned unchanged.
    """
    params = params or RankParams()
    w_qr = np.asarray(query_to_reply_w, dtype=float)
    w_rq = np.asarray(reply_to_query_w, dtype=float)
    if w_qr.ndim != 2 or w_rq.ndim != 2:
        raise InvalidMatrixError("weight matrices must be 2-d")
    n_q, n_r = w_qr.shape
    if w_rq.shape != (n_r, n_q):
        raise InvalidMatrixError(
            f"weight matrices disagree on sizes: {w_qr.shape} vs {w_rq.shape}"
        )
    x_hat = np.asarray(query_prior, dtype=float)
    y_hat = np.asarray(reply_prior, dtype=float)
    if x_hat.shape != (n_q,) or y_hat.shape != (n_r,):
        raise InvalidMatrixError("prior lengths must match the weight matrices")

    to_query, to_reply = _cross_transitions(w_qr, w_rq)
    ax, ay = params.alpha_x, params.alpha_y
    x, y = x_hat.copy(), y_hat.copy()
    residual = float("inf")
    for _ in range(params.max_local_iters):
        nx = ax * (to_query @ y) + (1.0 - ax) * x_hat
        ny = ay * (to_reply @ x) + (1.0 - ay) * y_hat
        residual = (
            float(np.sum((nx - x) ** 2) + np.sum((ny - y) ** 2)) / (n_q + n_r)
        )
        x, y = nx, ny
        if residual < params.local_tol:
            return x, y
    raise ConvergenceError(
        "hub/authority iteration did not converge", residual=residual, last=(x, y)
    )


@dataclass(frozen=True)
class RerankState:
    """One immutable reranking problem instance.

    Holds the texts, both within-side similarity graphs (zero diagonal), the
    query x reply relevance matrix (entries strictly inside (0, 1)), and the
    textual priors for both sides. Solvers never mutate a state; scores and
    iteration traces travel in the returned :class:`RankedList`.
    """

    query_texts: tuple[str, ...]
    candidate_texts: tuple[str, ...]
    query_sim: np.ndarray
    reply_sim: np.ndarray
    relevance: np.ndarray
    query_prior: np.ndarray
    reply_prior: np.ndarray

    def __post_init__(self):
        n_q, n_r = len(self.query_texts), len(self.candidate_texts)
        if n_q < 1 or n_r < 1:
            raise InvalidMatrixError("need at least one query and one candidate")
        if self.query_sim.shape != (n_q, n_q) or self.reply_sim.shape != (n_r, n_r):
            raise InvalidMatrixError("similarity graph shapes do not match the texts")
        if self.relevance.shape != (n_q, n_r):
            raise InvalidMatrixError("relevance matrix shape does not match the texts")
        if np.any(self.query_sim < 0.0) or np.any(self.reply_sim < 0.0):
            raise InvalidMatrixError("similarity entries must be >= 0")
        if np.any(self.relevance <= 0.0) or np.any(self.relevance >= 1.0):
            raise InvalidMatrixError("relevance entries must lie strictly inside (0, 1)")
        for prior, n in ((self.query_prior, n_q), (self.reply_prior, n_r)):
            if prior.shape != (n,):
                raise InvalidMatrixError("prior length does not match the texts")
            if np.any(prior < 0.0) or abs(float(prior.sum()) - 1.0) > 1e-9:
                raise InvalidMatrixError("priors must be nonnegative and sum to 1")


def build_rerank_state(
    query_texts: Sequence[str],
    candidate_texts: Sequence[str],
    stats: CorpusStats | None = None,
) -> RerankState:
    """Assemble a :class:`RerankState` from raw texts.

    ``stats`` fixes the corpus snapshot used for all lexical scores; when
    omitted, a snapshot is built from the given texts themselves. Similarity
    graphs get a zero diagonal: a node does not recommend itself, its mass
    has to flow through actual neighbors.
    """
    queries = tuple(query_texts)
    candidates = tuple(candidate_texts)
    if not queries or not candidates:
        raise InvalidMatrixError("need at least one query and one candidate")
    if stats is None:
        stats = CorpusStats.from_texts(list(queries) + list(candidates))

    n_q, n_r = len(queries), len(candidates)
    query_sim = np.zeros((n_q, n_q))
    for i in range(n_q):
        for j in range(i + 1, n_q):
            query_sim[i, j] = query_sim[j, i] = similarity(queries[i], queries[j], stats)
    reply_sim = np.zeros((n_r, n_r))
    for i in range(n_r):
        for j in range(i + 1, n_r):
            reply_sim[i, j] = reply_sim[j, i] = similarity(
                candidates[i], candidates[j], stats
            )
    relevance = np.empty((n_q, n_r))
    sim_qr = np.empty((n_q, n_r))
    for i, q in enumerate(queries):
        for j, r in enumerate(candidates):
            relevance[i, j] = relevance_phi(q, r, stats)
            sim_qr[i, j] = similarity(q, r, stats)
    query_prior, reply_prior = compute_priors(sim_qr)
    return RerankState(
        query_texts=queries,
        candidate_texts=candidates,
        query_sim=query_sim,
        reply_sim=reply_sim,
        relevance=relevance,
        query_prior=query_prior,
        reply_prior=reply_prior,
    )


@dataclass(frozen=True)
class GlobalIteration:
    """Snapshot of one outer iteration: both score vectors and the step size."""

    query_scores: np.ndarray
    reply_scores: np.ndarray
    mean_square_diff: float


@dataclass(frozen=True)
class RankedList:
    """Candidate indices in final order with their scores and solver trace."""

    candidate_ids: tuple[int, ...]
    scores: tuple[float, ...]
    method: str
    trace: tuple[GlobalIteration, ...] = field(default=())

    def top(self) -> int:
        return self.candidate_ids[0]


def _ranked(scores: np.ndarray, method: str, trace=()) -> RankedList:
    # Descending score; equal scores fall back to ascending candidate index.
    order = sorted(range(len(scores)), key=lambda j: (-scores[j], j))
    return RankedList(
        candidate_ids=tuple(order),
        scores=tuple(float(scores[j]) for j in order),
        method=method,
        trace=tuple(trace),
    )


def bi_pagerank_hits(state: RerankState, params: RankParams | None = None) -> RankedList:
    """Alternating PageRank / bipartite-propagation reranker.

    Each outer iteration runs, in order: PageRank over the query graph
    (prior = uniform on the first pass, the current hub scores x after
    that), a rebuild of the query->reply weight matrix from the fresh query
    scores, a coupled hub/authority solve, then the mirror image on the
    reply side (PageRank prior = uniform first, authority scores y after;
    rebuild reply->query weights; coupled solve). The loop stops once the
    concatenated (x, y) moves less than ``global_tol`` in mean square
    between successive outer iterations.

    Candidates come back ordered by final authority score, ties broken by
    ascending candidate index. The per-iteration trace records both vectors
    and the step size.
    """
    params = params or RankParams()
    n_q, n_r = len(state.query_texts), len(state.candidate_texts)
    uniform_q, uniform_r = uniform_scores(n_q), uniform_scores(n_r)

    x, y = state.query_prior.copy(), state.reply_prior.copy()
    # Before either side has PageRank scores, weight matrices start from
    # uniform source scores, matching the uniform first-pass priors.
    w_qr = hits_weight_matrix(state.relevance, uniform_q, QUERY_TO_REPLY)
    w_rq = hits_weight_matrix(state.relevance.T, uniform_r, REPLY_TO_QUERY)

    trace: list[GlobalIteration] = []
    residual = float("inf")
    for iteration in range(1, params.max_global_iters + 1):
        previous = np.concatenate([x, y])

        q_prior = uniform_q if iteration == 1 else x
        q_scores = pagerank_solve(state.query_sim, q_prior, params)
        w_qr = hits_weight_matrix(state.relevance, q_scores, QUERY_TO_REPLY)
        x, y = co_hits_solve(w_qr, w_rq, state.query_prior, state.reply_prior, params)

        r_prior = uniform_r if iteration == 1 else y
        r_scores = pagerank_solve(state.reply_sim, r_prior, params)
        w_rq = hits_weight_matrix(state.relevance.T, r_scores, REPLY_TO_QUERY)
        x, y = co_hits_solve(w_qr, w_rq, state.query_prior, state.reply_prior, params)

        residual = mean_square_diff(np.concatenate([x, y]), previous)
        trace.append(GlobalIteration(x.copy(), y.copy(), residual))
        if residual < params.global_tol:
            return _ranked(y, "bi_pagerank_hits", trace)
    raise ConvergenceError(
        "alternating reranker did not converge",
        residual=residual,
        trace=tuple(trace),
    )


def rank_baseline(
    method: str, state: RerankState, params: RankParams | None = None
) -> RankedList:
    """Reference rankers sharing the ordering rule of the full solver.

    textual          mean lexical relevance over the queries
    reply_pagerank   PageRank over the reply similarity graph, uniform prior
    hits             pure coupled propagation (alpha_x = alpha_y = 1,
                     uniform source scores and priors)
    co_hits          coupled propagation with default mixing and textual priors
    """
    params = params or RankParams()
    n_q, n_r = len(state.query_texts), len(state.candidate_texts)
    uniform_q, uniform_r = uniform_scores(n_q), uniform_scores(n_r)
    if method == "textual":
        scores = state.relevance.mean(axis=0)
    elif method == "reply_pagerank":
        scores = pagerank_solve(state.reply_sim, uniform_r, params)
    elif method == "hits":
        pure = dataclasses.replace(params, alpha_x=1.0, alpha_y=1.0)
        w_qr = hits_weight_matrix(state.relevance, uniform_q, QUERY_TO_REPLY)
        w_rq = hits_weight_matrix(state.relevance.T, uniform_r, REPLY_TO_QUERY)
        _, scores = co_hits_solve(w_qr, w_rq, uniform_q, uniform_r, pure)
    elif method == "co_hits":
        w_qr = hits_weight_matrix(state.relevance, uniform_q, QUERY_TO_REPLY)
        w_rq = hits_weight_matrix(state.relevance.T, uniform_r, REPLY_TO_QUERY)
        _, scores = co_hits_solve(
            w_qr, w_rq, state.query_prior, state.reply_prior, params
        )
    else:
        raise ValueError(
            f"unknown ranking method {method!r}; expected one of {BASELINE_METHODS}"
        )
    return _ranked(np.asarray(scores, dtype=float), method)


def rank_with_method(
    method: str, state: RerankState, params: RankParams | None = None
) -> RankedList:
    """Dispatch helper covering the full solver and every baseline."""
    if method == "bi_pagerank_hits":
        return bi_pagerank_hits(state, params)
    return rank_baseline(method, state, params)
