#!/usr/bin/env python3
"""Walk through one reranking run on a tiny hand-built instance.

Two context utterances, four candidate replies. The script prints the
inputs, every outer iteration of the alternating solver, and the final
ranking next to the plain baselines.
"""

import numpy as np

from icebreaker.ranking import (
    BASELINE_METHODS,
    RerankState,
    bi_pagerank_hits,
    rank_baseline,
)

np.set_printoptions(precision=4, suppress=True)

queries = ("did you watch the robot movie", "the robot was so sweet")
candidates = (
    "the robot and his friend explore space",
    "i prefer cooking shows",
    "space movies are the best movies",
    "robots will do all the cooking one day",
)

# similarity matrices: symmetric, zero diagonal
query_sim = np.array([[0.0, 0.62], [0.62, 0.0]])
reply_sim = np.array(
    [
        [0.00, 0.05, 0.48, 0.22],
        [0.05, 0.00, 0.08, 0.35],
        [0.48, 0.08, 0.00, 0.12],
        [0.22, 0.35, 0.12, 0.00],
    ]
)

# relevance of each candidate (columns) to each context utterance (rows)
relevance = np.array(
    [
        [0.72, 0.08, 0.55, 0.40],
        [0.66, 0.05, 0.30, 0.45],
    ]
)

prior_q = relevance.mean(axis=1)
prior_r = relevance.mean(axis=0)
state = RerankState(
    query_texts=queries,
    candidate_texts=candidates,
    query_sim=query_sim,
    reply_sim=reply_sim,
    relevance=relevance,
    query_prior=prior_q / prior_q.sum(),
    reply_prior=prior_r / prior_r.sum(),
)

print("context utterances:")
for i, text in enumerate(queries):
    print(f"  q{i}: {text}")
print("candidates:")
for j, text in enumerate(candidates):
    print(f"  r{j}: {text}")
print()

ranked = bi_pagerank_hits(state)

print(f"outer iterations until convergence: {len(ranked.trace)}")
for n, it in enumerate(ranked.trace, start=1):
    print(
        f"  iter {n}: step={it.mean_square_diff:.3e}"
        f"  query scores {it.query_scores}  reply scores {it.reply_scores}"
    )
print()

print("final ranking (walk-based):")
for cid, score in zip(ranked.candidate_ids, ranked.scores):
    print(f"  {score:.4f}  r{cid}  {candidates[cid]}")
print()

# the same instance under each baseline, top pick only
print("top candidate per method:")
print(f"  {'bi_pagerank_hits':<18} r{ranked.candidate_ids[0]}")
for method in BASELINE_METHODS:
    top = rank_baseline(method, state).candidate_ids[0]
    print(f"  {method:<18} r{top}")
