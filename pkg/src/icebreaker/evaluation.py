"""Offline ranking evaluation on labeled instances.

An instance is a conversation context plus a fixed pool of candidate replies
with binary relevance labels. Every configured ranking method reorders every
instance's pool, and the grid of averaged metrics (precision at 1, mean
average precision, normalized discounted cumulative gain) is reported per
instance group and method. All of it is deterministic, so a report can be
pinned byte-for-byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from icebreaker.ranking import ALL_METHODS, RankParams, build_rerank_state, rank_with_method
from icebreaker.textscore import CorpusStats

GROUPS = ("introducing", "non_introducing")


@dataclass(frozen=True)
class LabeledCandidate:
    text: str
    label: int


@dataclass(frozen=True)
class LabeledInstance:
    group: str
    context: tuple[str, ...]
    candidates: tuple[LabeledCandidate, ...]
    entities: tuple[str, ...] = ()


class InstanceLoadError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def load_instances(path: str | Path) -> list[LabeledInstance]:
    """Read one JSON object per line; see the packaged file for the schema."""
    instances: list[LabeledInstance] = []
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InstanceLoadError(f"bad JSON: {exc}", line_no) from None
        try:
            group = record["group"]
            context = tuple(record["context"])
            candidates = tuple(
                LabeledCandidate(c["text"], int(c["label"]))
                for c in record["candidates"]
            )
        except (KeyError, TypeError) as exc:
            raise InstanceLoadError(f"missing or malformed field: {exc}", line_no) from None
        if group not in GROUPS:
            raise InstanceLoadError(f"unknown group {group!r}", line_no)
        if not context or not candidates:
            raise InstanceLoadError("context and candidates must be nonempty", line_no)
        if any(c.label not in (0, 1) for c in candidates):
            raise InstanceLoadError("labels must be 0 or 1", line_no)
        instances.append(
            LabeledInstance(
                group, context, candidates, tuple(record.get("entities", ()))
            )
        )
    return instances


def compute_metrics(
    ranking: Sequence[int], labels: Mapping[int, int]
) -> tuple[float, float, float]:
    """(precision@1, average precision, nDCG) for one ranked list.

    ``ranking`` holds candidate ids best-first; every id must be labeled.
    Average precision is the mean of precision-at-rank over the relevant
    items; with no relevant item both AP and nDCG are defined as 0. The
    nDCG gain of rank i (1-based) is label / log2(i + 1), normalized by the
    same sum over the ideal label ordering.
    """
    if not ranking:
        raise ValueError("ranking must be nonempty")
    try:
        ranked_labels = [labels[cid] for cid in ranking]
    except KeyError as exc:
        raise ValueError(f"candidate {exc.args[0]!r} has no label") from None

    p_at_1 = float(ranked_labels[0])

    hits = 0
    precisions = []
    for rank, label in enumerate(ranked_labels, start=1):
        if label:
            hits += 1
            precisions.append(hits / rank)
    average_precision = sum(precisions) / len(precisions) if precisions else 0.0

    dcg = sum(
        label / math.log2(rank + 1)
        for rank, label in enumerate(ranked_labels, start=1)
    )
    ideal = sum(
        label / math.log2(rank + 1)
        for rank, label in enumerate(sorted(ranked_labels, reverse=True), start=1)
    )
    ndcg = dcg / ideal if ideal > 0.0 else 0.0
    return p_at_1, average_precision, ndcg


def rank_instance(
    instance: LabeledInstance, method: str, params: RankParams | None = None
) -> list[int]:
    """Candidate indices of one instance, best first, under one method.

    Lexical statistics are taken from the instance's own texts, so an
    instance is a self-contained unit of evaluation.
    """
    texts = [c.text for c in instance.candidates]
    stats = CorpusStats.from_texts(list(instance.context) + texts)
    state = build_rerank_state(list(instance.context), texts, stats)
    return list(rank_with_method(method, state, params).candidate_ids)


@dataclass(frozen=True)
class MetricCell:
    p_at_1: float
    mean_ap: float
    mean_ndcg: float
    instances: int


@dataclass(frozen=True)
class MetricReport:
    """Averaged metrics per (group, method) cell, in a fixed grid order."""

    groups: tuple[str, ...]
    methods: tuple[str, ...]
    cells: dict[tuple[str, str], MetricCell]


def run_eval(
    instances: Sequence[LabeledInstance],
    methods: Sequence[str] = ALL_METHODS,
    groups: Sequence[str] = GROUPS,
    params: RankParams | None = None,
) -> MetricReport:
    if not instances:
        raise ValueError("need at least one labeled instance")
    for method in methods:
        if method not in ALL_METHODS:
            raise ValueError(f"unknown method {method!r}; expected one of {ALL_METHODS}")
    for group in groups:
        if group not in GROUPS:
            raise ValueError(f"unknown group {group!r}; expected one of {GROUPS}")

    cells: dict[tuple[str, str], MetricCell] = {}
    for group in groups:
        members = [inst for inst in instances if inst.group == group]
        if not members:
            raise ValueError(f"no instances in group {group!r}")
        for method in methods:
            totals = [0.0, 0.0, 0.0]
            for instance in members:
                ranking = rank_instance(instance, method, params)
                labels = {i: c.label for i, c in enumerate(instance.candidates)}
                for slot, value in enumerate(compute_metrics(ranking, labels)):
                    totals[slot] += value
            n = len(members)
            cells[(group, method)] = MetricCell(
                p_at_1=totals[0] / n,
                mean_ap=totals[1] / n,
                mean_ndcg=totals[2] / n,
                instances=n,
            )
    return MetricReport(tuple(groups), tuple(methods), cells)


def report_to_dict(report: MetricReport) -> dict:
    return {
        "groups": list(report.groups),
        "methods": list(report.methods),
        "cells": [
            {
                "group": group,
                "method": method,
                "p_at_1": cell.p_at_1,
                "map": cell.mean_ap,
                "ndcg": cell.mean_ndcg,
                "instances": cell.instances,
            }
            for group in report.groups
            for method in report.methods
            for cell in [report.cells[(group, method)]]
        ],
    }


def render_text(report: MetricReport) -> str:
    """Fixed-width table with one row per (group, method) cell."""
    headers = ("group", "method", "p@1", "MAP", "nDCG", "n")
    rows = [
        (
            group,
            method,
            f"{cell.p_at_1:.4f}",
            f"{cell.mean_ap:.4f}",
            f"{cell.mean_ndcg:.4f}",
            str(cell.instances),
        )
        for group in report.groups
        for method in report.methods
        for cell in [report.cells[(group, method)]]
    ]
    widths = [
        max(len(headers[col]), max(len(row[col]) for row in rows))
        for col in range(len(headers))
    ]
    def fmt(row):
        return "  ".join(cell.ljust(widths[col]) for col, cell in enumerate(row)).rstrip()
    lines = [fmt(headers), fmt(tuple("-" * w for w in widths))]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines) + "\n"


def report_to_json(report: MetricReport) -> str:
    return json.dumps(report_to_dict(report), ensure_ascii=False, sort_keys=True, indent=2) + "\n"
