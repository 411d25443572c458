#!/usr/bin/env python3
"""Measure outer-iteration counts of the alternating solver on random instances.

Draws 200 random instances up to 10 context utterances by 50 candidates,
runs the full reranker at default parameters, and prints the iteration
distribution plus wall time. The solver settles within a handful of outer
iterations across sizes.
"""

import time
from collections import Counter

import numpy as np

from icebreaker.ranking import RerankState, bi_pagerank_hits


def random_state(rng: np.random.Generator) -> RerankState:
    n_q = int(rng.integers(1, 11))
    n_r = int(rng.integers(2, 51))
    q_sim = rng.random((n_q, n_q))
    q_sim = (q_sim + q_sim.T) / 2
    np.fill_diagonal(q_sim, 0.0)
    r_sim = rng.random((n_r, n_r))
    r_sim = (r_sim + r_sim.T) / 2
    np.fill_diagonal(r_sim, 0.0)
    phi = rng.random((n_q, n_r)) * 0.98 + 0.01
    qp = rng.random(n_q) + 0.05
    rp = rng.random(n_r) + 0.05
    return RerankState(
        query_texts=tuple(f"q{i}" for i in range(n_q)),
        candidate_texts=tuple(f"r{j}" for j in range(n_r)),
        query_sim=q_sim,
        reply_sim=r_sim,
        relevance=phi,
        query_prior=qp / qp.sum(),
        reply_prior=rp / rp.sum(),
    )


rng = np.random.default_rng(7)
sizes = []
counts = []
start = time.perf_counter()
for _ in range(200):
    state = random_state(rng)
    sizes.append((len(state.query_texts), len(state.candidate_texts)))
    counts.append(len(bi_pagerank_hits(state).trace))
elapsed = time.perf_counter() - start

print(f"instances: {len(counts)}   total time: {elapsed:.2f}s")
print(f"iterations: min {min(counts)}  max {max(counts)}")
print()
print("distribution:")
for iters, n in sorted(Counter(counts).items()):
    print(f"  {iters:>2} iterations  {'#' * n} ({n})")
print()

# largest instances are no slower to settle than small ones
big = [c for (nq, nr), c in zip(sizes, counts) if nr >= 40]
small = [c for (nq, nr), c in zip(sizes, counts) if nr <= 10]
print(f"mean iterations, candidates >= 40: {sum(big) / len(big):.2f}")
print(f"mean iterations, candidates <= 10: {sum(small) / len(small):.2f}")
