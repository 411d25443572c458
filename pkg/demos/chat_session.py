#!/usr/bin/env python3
"""Scripted conversation against the packaged corpus and knowledge graph.

Shows both response paths: an ordinary content turn answered from corpus
similarity, then a stalled turn that triggers entity expansion and the
proactive topic-introducing ranking.
"""

from icebreaker.pipeline import (
    COMPUTER,
    HUMAN,
    ConversationSession,
    Resources,
    respond,
)

resources = Resources.load()
session = ConversationSession("demo")


def turn(text: str) -> None:
    print(f"human:    {text}")
    reply, trace = respond(session, text, resources)
    print(f"computer: {reply}")
    print(
        f"          [mode={trace.mode} stalemate={trace.stalemate}"
        f" entities={list(trace.detected_entities)}"
        f" candidates={len(trace.candidates)}]"
    )
    if trace.expanded_entities:
        chain = ", ".join(f"{e} ({w:.2f})" for e, w in trace.expanded_entities)
        print(f"          [expanded: {chain}]")
    print()


print(f"corpus pairs: {len(resources.index.pairs)}")
print()

# a content turn: scored against every reply in the corpus
turn("你看过机器人总动员吗？")

# seed one more entity-bearing exchange by hand
session.append(HUMAN, "我很喜欢那部电影")
session.append(COMPUTER, "瓦力和伊娃的故事确实很感人。")

# a stalled turn: filler only, so the engine has to bring up a topic itself
turn("呃…")

# inspect the last ranking trace in detail
_, trace = respond(session, "啊……", resources)
print("last proactive ranking, trace detail:")
print(
    "  iteration step sizes:"
    f" {[f'{it.mean_square_diff:.2e}' for it in trace.ranking.trace]}"
)
print("  top five candidates:")
for cid, score in zip(trace.ranking.candidate_ids[:5], trace.ranking.scores[:5]):
    pair_id = trace.candidates[cid][0]
    print(f"    {score:.4f}  {resources.index.pairs[pair_id].reply_text}")
