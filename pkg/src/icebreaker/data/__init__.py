"""Packaged demo fixtures: a toy corpus, entity graph, filler patterns,
and a labeled evaluation set. Small enough to read, large enough to drive
every pipeline path."""

from importlib import resources
from pathlib import Path


def _path(name: str) -> Path:
    return Path(str(resources.files("icebreaker.data").joinpath(name)))


def corpus_path() -> Path:
    return _path("corpus.tsv")


def kg_path() -> Path:
    return _path("kg.tsv")


def patterns_path() -> Path:
    return _path("patterns.txt")


def eval_instances_path() -> Path:
    return _path("eval_instances.jsonl")
