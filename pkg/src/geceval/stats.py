"""Statistical utilities: rank correlation, paired significance, agreement.

The permutation test is a paired sign-flip test over per-sentence metric
contributions: each iteration flips each sentence's (a, b) assignment with
probability 1/2, re-reduces both sides, and compares |delta| against the
observed one. Every iteration draws its randomness from (seed, iteration
index), so results are identical regardless of execution order or worker
scheduling.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import permutations
from typing import Callable, Sequence

import numpy as np
from scipy.special import stdtr
from scipy.stats import rankdata

from .errors import ContractViolation, InsufficientData

# Recorded in every SignificanceResult so divergence across library versions
# or languages is explainable from the report alone.
PERMUTATION_ALGORITHM = "sign-flip/numpy-default-rng(seed,iteration)"

EXACT_SPEARMAN_MAX_N = 8


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    p_value: float
    n: int


@dataclass(frozen=True)
class SignificanceResult:
    observed_delta: float
    p_value: float
    iterations: int
    seed: int
    algorithm: str = PERMUTATION_ALGORITHM


@dataclass(frozen=True)
class AgreementStats:
    kappa: float
    observed_agreement: float
    expected_agreement: float
    n: int


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc, yc = x - x.mean(), y - y.mean()
    denom = np.sqrt((xc @ xc) * (yc @ yc))
    return float((xc @ yc) / denom)


def spearman(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Spearman rho with average ranks for ties.

    The p-value is two-sided: exact enumeration of all rank permutations for
    n <= 8, the usual t-approximation above that.
    """
    xa, ya = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ContractViolation("inputs must be equal-length 1-D sequences")
    n = len(xa)
    if n < 3:
        raise InsufficientData(f"need at least 3 points, got {n}")
    if np.all(xa == xa[0]) or np.all(ya == ya[0]):
        raise InsufficientData("zero-variance input has no defined rank correlation")

    rx = rankdata(xa, method="average")
    ry = rankdata(ya, method="average")
    rho = _pearson(rx, ry)

    if n <= EXACT_SPEARMAN_MAX_N:
        perms = np.array(list(permutations(range(n))))
        rxc = rx - rx.mean()
        ryc = ry - ry.mean()
        denom = np.sqrt((rxc @ rxc) * (ryc @ ryc))
        rhos = (ryc[perms] @ rxc) / denom
        count = int(np.sum(np.abs(rhos) >= abs(rho) - 1e-12))
        p = count / len(perms)
    elif abs(rho) == 1.0:
        p = 0.0
    else:
        t = rho * np.sqrt((n - 2) / (1 - rho * rho))
        p = float(2 * stdtr(n - 2, -abs(t)))
    return CorrelationResult(rho=rho, p_value=p, n=n)


def permutation_test(
    per_sentence_a: Sequence[Sequence[float]],
    per_sentence_b: Sequence[Sequence[float]],
    metric_reducer: Callable[[np.ndarray], float],
    iterations: int = 10000,
    seed: int = 42,
) -> SignificanceResult:
    """Two-sided paired sign-flip permutation test.

    ``per_sentence_a/b`` are additive per-sentence contribution vectors (a
    scalar per sentence is accepted and treated as a 1-vector);
    ``metric_reducer`` turns a summed contribution vector into the corpus
    score. p = (1 + #{|delta_perm| >= |delta_obs|}) / (1 + iterations).
    """
    a = np.asarray(per_sentence_a, dtype=float)
    b = np.asarray(per_sentence_b, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.shape != b.shape:
        raise ContractViolation(f"contribution shapes differ: {a.shape} vs {b.shape}")
    if len(a) == 0:
        raise ContractViolation("no per-sentence contributions")
    if iterations < 0:
        raise ContractViolation("iterations must be non-negative")
    if iterations == 0:
        warnings.warn("permutation test with 0 iterations is degenerate (p = 1.0)",
                      stacklevel=2)

    observed = metric_reducer(a.sum(axis=0)) - metric_reducer(b.sum(axis=0))
    at_least = 0
    for i in range(iterations):
        rng = np.random.default_rng([seed, i])
        flips = rng.random(len(a)) < 0.5
        mask = flips[:, None]
        sum_a = np.where(mask, b, a).sum(axis=0)
        sum_b = np.where(mask, a, b).sum(axis=0)
        delta = metric_reducer(sum_a) - metric_reducer(sum_b)
        if abs(delta) >= abs(observed):
            at_least += 1
    p = (1 + at_least) / (1 + iterations)
    return SignificanceResult(observed_delta=float(observed), p_value=p,
                              iterations=iterations, seed=seed)


def permutation_test_exhaustive(
    per_sentence_a: Sequence[Sequence[float]],
    per_sentence_b: Sequence[Sequence[float]],
    metric_reducer: Callable[[np.ndarray], float],
) -> SignificanceResult:
    """Exact sign-flip test enumerating all 2^n assignments (small n only).

    The p-value here is the unsmoothed exact tail fraction; it always counts
    the identity assignment, so p >= 1/2^n.
    """
    a = np.asarray(per_sentence_a, dtype=float)
    b = np.asarray(per_sentence_b, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.shape != b.shape:
        raise ContractViolation(f"contribution shapes differ: {a.shape} vs {b.shape}")
    n = len(a)
    if not 0 < n <= 20:
        raise ContractViolation("exhaustive enumeration supports 1..20 sentences")

    observed = metric_reducer(a.sum(axis=0)) - metric_reducer(b.sum(axis=0))
    at_least = 0
    for bits in range(2 ** n):
        mask = np.array([(bits >> k) & 1 for k in range(n)], dtype=bool)[:, None]
        sum_a = np.where(mask, b, a).sum(axis=0)
        sum_b = np.where(mask, a, b).sum(axis=0)
        if abs(metric_reducer(sum_a) - metric_reducer(sum_b)) >= abs(observed):
            at_least += 1
    return SignificanceResult(observed_delta=float(observed),
                              p_value=at_least / 2 ** n,
                              iterations=2 ** n, seed=0,
                              algorithm="sign-flip/exhaustive")


def cohen_kappa(labels_a: Sequence, labels_b: Sequence) -> AgreementStats:
    """Chance-corrected agreement between two raters over a shared label set."""
    if len(labels_a) != len(labels_b):
        raise ContractViolation("label sequences must have equal length")
    n = len(labels_a)
    if n == 0:
        raise ContractViolation("empty label sequences")
    observed = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    counts_a: dict = {}
    counts_b: dict = {}
    for a, b in zip(labels_a, labels_b):
        counts_a[a] = counts_a.get(a, 0) + 1
        counts_b[b] = counts_b.get(b, 0) + 1
    expected = sum(
        (counts_a.get(label, 0) / n) * (counts_b.get(label, 0) / n)
        for label in set(counts_a) | set(counts_b)
    )
    if expected == 1.0:
        kappa = 1.0  # both raters constant and identical
    else:
        kappa = (observed - expected) / (1 - expected)
    return AgreementStats(kappa=kappa, observed_agreement=observed,
                          expected_agreement=expected, n=n)
