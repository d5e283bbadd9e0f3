"""Closed-class word lists shipped as versioned data files.

Files live under ``geceval/data`` and are plain UTF-8 word lists, one entry
per line, ``#`` comments allowed. They are the reproducibility anchor for
rule-based error classification: results change only when these files do.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=None)
def _wordset(name: str) -> frozenset[str]:
    text = resources.files("geceval").joinpath("data", name).read_text("utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def determiners() -> frozenset[str]:
    return _wordset("determiners.txt")


def prepositions() -> frozenset[str]:
    return _wordset("prepositions.txt")


def conjunctions() -> frozenset[str]:
    return _wordset("conjunctions.txt")


def verbs() -> frozenset[str]:
    """Common verb base forms (disambiguates -s/-es verb vs. noun pairs)."""
    return _wordset("verbs.txt")


def punctuation_tokens() -> frozenset[str]:
    return _wordset("punctuation.txt")


@lru_cache(maxsize=None)
def _punct_chars() -> frozenset[str]:
    return frozenset(t for t in punctuation_tokens() if len(t) == 1)


def is_punct(token: str) -> bool:
    """True for listed punctuation tokens or strings of punctuation characters."""
    if token in punctuation_tokens():
        return True
    chars = _punct_chars()
    return all(c in chars for c in token)
