"""System combination: sentence-level majority voting with pluggable fallbacks,
plus the edit-level voting baseline.

Consensus is decided on whole candidate sentences (single-space token join,
no case folding). A qualifying majority is always returned as-is — the
fallback strategy only ever sees sentences with no consensus, and provider
requirements are checked lazily so a missing provider cannot fail a corpus
that never needs it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Protocol, Sequence

from .corpus import Edit, Sentence, edits_overlap
from .errors import ConfigurationError, ContractViolation
from .metrics import PerplexityProvider


class Fallback(enum.Enum):
    BEST_MODEL = "best"
    META_MODEL = "meta"
    PERPLEXITY = "perplexity"
    NGRAM = "ngram"


class MetaJudgeClient(Protocol):
    """Picks the preferred candidate index for a source sentence."""

    def choose(self, source: Sentence, candidates: Sequence[Sentence]) -> int: ...


@dataclass(frozen=True)
class EnsembleConfig:
    fallback: Fallback = Fallback.BEST_MODEL
    # System ids are candidate indices; None means index order (0 is best).
    priority: tuple[int, ...] | None = None
    ngram_n: int = 3
    vote_threshold: int | None = None

    def resolved_priority(self, k: int) -> tuple[int, ...]:
        if self.priority is None:
            return tuple(range(k))
        if sorted(self.priority) != list(range(k)):
            raise ConfigurationError(
                f"priority {self.priority} is not a permutation of the {k} system ids"
            )
        return self.priority

    def resolved_threshold(self, k: int) -> int:
        threshold = self.vote_threshold if self.vote_threshold is not None else math.ceil(k / 2)
        if threshold < 1:
            raise ConfigurationError("vote threshold must be >= 1")
        return threshold

    def __post_init__(self):
        if self.ngram_n < 1:
            raise ConfigurationError("ngram_n must be >= 1")


def _ngram_set(tokens: Sequence[str], n: int) -> frozenset[tuple[str, ...]]:
    if len(tokens) < n:
        # Short sentences contribute their full token sequence as one n-gram.
        return frozenset({tuple(tokens)})
    return frozenset(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def jaccard_ngram(a: Sentence, b: Sentence, n: int) -> float:
    """Jaccard similarity of word n-gram sets; 1.0 for two empty sentences."""
    if n < 1:
        raise ContractViolation("n-gram order must be >= 1")
    ga, gb = _ngram_set(a.tokens, n), _ngram_set(b.tokens, n)
    union = ga | gb
    if not union:
        return 1.0
    return len(ga & gb) / len(union)


def _majority(candidates: Sequence[Sentence], threshold: int,
              priority: Sequence[int]) -> Sentence | None:
    groups: dict[str, list[int]] = {}
    for i, cand in enumerate(candidates):
        groups.setdefault(cand.text, []).append(i)
    rank = {sys_id: pos for pos, sys_id in enumerate(priority)}
    qualifying = [members for members in groups.values() if len(members) >= threshold]
    if not qualifying:
        return None
    best = min(qualifying, key=lambda members: min(rank[i] for i in members))
    return candidates[best[0]]


def ensemble_sentence(
    source: Sentence,
    candidates: Sequence[Sentence],
    config: EnsembleConfig = EnsembleConfig(),
    ppl: PerplexityProvider | None = None,
    judge: MetaJudgeClient | None = None,
) -> Sentence:
    """Majority-voted output for one sentence, falling back when no consensus."""
    k = len(candidates)
    if k < 2:
        raise ContractViolation("ensembling requires at least 2 candidates")
    priority = config.resolved_priority(k)
    threshold = config.resolved_threshold(k)

    winner = _majority(candidates, threshold, priority)
    if winner is not None:
        return winner

    if config.fallback is Fallback.BEST_MODEL:
        return candidates[priority[0]]
    if config.fallback is Fallback.META_MODEL:
        if judge is None:
            raise ConfigurationError("MetaModel fallback requires a judge client")
        index = judge.choose(source, candidates)
        if not 0 <= index < k:
            raise ContractViolation(f"judge returned out-of-range index {index}")
        return candidates[index]
    if config.fallback is Fallback.PERPLEXITY:
        if ppl is None:
            raise ConfigurationError("Perplexity fallback requires a perplexity provider")
        scores = [ppl.perplexity(c) for c in candidates]
        return candidates[min(priority, key=lambda i: (scores[i], priority.index(i)))]
    # NGram: highest mean Jaccard against the other candidates.
    means = []
    for i, cand in enumerate(candidates):
        others = [jaccard_ngram(cand, other, config.ngram_n)
                  for j, other in enumerate(candidates) if j != i]
        means.append(sum(others) / len(others))
    return candidates[min(priority, key=lambda i: (-means[i], priority.index(i)))]


def ensemble_corpus(
    sources: Sequence[Sentence],
    per_system: Sequence[Sequence[Sentence]],
    config: EnsembleConfig = EnsembleConfig(),
    ppl: PerplexityProvider | None = None,
    judge: MetaJudgeClient | None = None,
) -> list[Sentence]:
    """Combine K aligned hypothesis files sentence by sentence."""
    if len(per_system) < 2:
        raise ContractViolation("ensembling requires at least 2 systems")
    for hyps in per_system:
        if len(hyps) != len(sources):
            raise ContractViolation(
                f"system hypothesis count {len(hyps)} != source count {len(sources)}"
            )
    return [
        ensemble_sentence(src, [hyps[i] for hyps in per_system], config, ppl, judge)
        for i, src in enumerate(sources)
    ]


def edit_majority(
    edit_sets: Sequence[Sequence[Edit]],
    threshold: int,
    priority: Sequence[int] | None = None,
) -> tuple[Edit, ...]:
    """Edit-level voting baseline: keep edits proposed by >= threshold systems.

    Kept edits that overlap are all dropped (conservative conflict rule), so
    the result always applies cleanly. Tags come from the first proposing
    system in priority order.
    """
    if threshold < 1:
        raise ContractViolation("vote threshold must be >= 1")
    order = tuple(priority) if priority is not None else tuple(range(len(edit_sets)))
    if sorted(order) != list(range(len(edit_sets))):
        raise ConfigurationError(
            f"priority {order} is not a permutation of the {len(edit_sets)} system ids"
        )

    votes: dict[tuple, int] = {}
    for edits in edit_sets:
        for key in {e.key for e in edits}:
            votes[key] = votes.get(key, 0) + 1

    kept: list[Edit] = []
    for key, count in votes.items():
        if count < threshold:
            continue
        for sys_id in order:
            owner = next((e for e in edit_sets[sys_id] if e.key == key), None)
            if owner is not None:
                kept.append(owner)
                break
    kept.sort(key=lambda e: (e.start, e.end, e.replacement))

    conflicted = set()
    for i, a in enumerate(kept):
        for b in kept[i + 1:]:
            if edits_overlap(a, b):
                conflicted.add(a.key)
                conflicted.add(b.key)
    return tuple(e for e in kept if e.key not in conflicted)
