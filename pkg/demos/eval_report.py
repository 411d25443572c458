#!/usr/bin/env python3
"""Score every ranking method on the packaged labeled instances.

Each instance carries a context, a candidate pool, and relevance labels;
instances are grouped by whether the engine had to introduce a topic.
Prints the metric table and a per-instance breakdown for one method.
"""

from icebreaker import data
from icebreaker.evaluation import (
    compute_metrics,
    load_instances,
    rank_instance,
    render_text,
    run_eval,
)

instances = load_instances(data.eval_instances_path())
print(f"instances: {len(instances)}")
for group in ("introducing", "non_introducing"):
    n = sum(1 for i in instances if i.group == group)
    print(f"  {group}: {n}")
print()

report = run_eval(instances)
print(render_text(report))
print()

# where the walk-based method wins and loses, instance by instance
print("bi_pagerank_hits per instance:")
for instance in instances:
    ranking = rank_instance(instance, "bi_pagerank_hits")
    labels = {i: c.label for i, c in enumerate(instance.candidates)}
    p1, ap, ndcg = compute_metrics(ranking, labels)
    print(
        f"  {instance.group:<16} p@1={p1:.0f} AP={ap:.4f} nDCG={ndcg:.4f}"
        f"  context: {instance.context[-1][:30]}"
    )
