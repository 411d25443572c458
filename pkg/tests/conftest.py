from __future__ import annotations

import pytest

from icebreaker.pipeline import Resources


@pytest.fixture()
def write_file(tmp_path):
    """Return a helper that drops text into a unique temp file."""
    counter = {"n": 0}

    def _write(content: str, suffix: str = ".txt"):
        counter["n"] += 1
        path = tmp_path / f"fixture_{counter['n']}{suffix}"
        path.write_text(content, encoding="utf-8")
        return path

    return _write


@pytest.fixture(scope="session")
def packaged_resources() -> Resources:
    # One shared copy of the shipped fixtures; all consumers treat it read-only.
    return Resources.load()
