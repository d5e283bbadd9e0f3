"""Reference-based and reference-free scoring of GEC hypotheses.

Edit-level scoring matches hypothesis edits against gold edits on
``(start, end, replacement)`` only — tags never influence matching. Per
sentence, the annotator whose gold set maximizes the sentence-local F-beta
is selected (ties: more true positives, then lower annotator id); the
comparison uses exact rational arithmetic so selection is never subject to
floating-point noise. Corpus totals sum the selected per-sentence counts
left to right.

The weighted variant accumulates per-edit weights instead of unit counts;
with the default unit-weight provider it is bit-for-bit identical to the
unweighted scorer (they share one code path).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Protocol, Sequence

from .corpus import AnnotatedSentence, Corpus, Edit, ErrorTag, Sentence
from .errors import ContractViolation, GecEvalError

DEFAULT_BETA = 0.5

# Sentinel annotator id reported when a sentence carries no annotations at
# all: it is scored against a single implicit empty (noop) reference.
IMPLICIT_ANNOTATOR = -1

WeightProvider = Callable[[Edit, Sentence], float]


def unit_weight(edit: Edit, source: Sentence) -> float:
    return 1.0


class PerplexityProvider(Protocol):
    """Maps a sentence to a positive perplexity; deterministic per configuration."""

    def perplexity(self, sentence: Sentence) -> float: ...


def precision_recall_f(tp: float, fp: float, fn: float, beta: float = DEFAULT_BETA):
    """P, R, F-beta with the 0/0 conventions (P, R default 1; F defaults 0)."""
    p = tp / (tp + fp) if tp + fp else 1.0
    r = tp / (tp + fn) if tp + fn else 1.0
    denom = beta * beta * p + r
    f = (1 + beta * beta) * p * r / denom if denom else 0.0
    return p, r, f


def _f_exact(tp: Fraction, fp: Fraction, fn: Fraction, beta2: Fraction) -> Fraction:
    # Same value as precision_recall_f via the identity
    # F = (1+b^2)tp / ((1+b^2)tp + b^2*fn + fp), with the all-zero case -> 1.
    denom = (1 + beta2) * tp + beta2 * fn + fp
    if denom == 0:
        return Fraction(1)
    return (1 + beta2) * tp / denom


@dataclass(frozen=True)
class SentenceMatch:
    """Match outcome for one sentence against its selected annotator."""

    annotator: int
    tp: Fraction
    fp: Fraction
    fn: Fraction
    matched_ref: tuple[Edit, ...]
    missed_ref: tuple[Edit, ...]
    matched_hyp: tuple[Edit, ...]
    spurious_hyp: tuple[Edit, ...]


def _match_against(
    hyp_by_key: dict, ref_edits: Sequence[Edit], source: Sentence, weigh: WeightProvider
):
    ref_by_key = {e.key: e for e in ref_edits}
    matched_ref, missed_ref, matched_hyp, spurious_hyp = [], [], [], []
    tp = fp = fn = Fraction(0)
    for key, ref_edit in ref_by_key.items():
        w = _checked_weight(weigh, ref_edit, source)
        if key in hyp_by_key:
            tp += w
            matched_ref.append(ref_edit)
            matched_hyp.append(hyp_by_key[key])
        else:
            fn += w
            missed_ref.append(ref_edit)
    for key, hyp_edit in hyp_by_key.items():
        if key not in ref_by_key:
            fp += _checked_weight(weigh, hyp_edit, source)
            spurious_hyp.append(hyp_edit)
    return tp, fp, fn, matched_ref, missed_ref, matched_hyp, spurious_hyp


def _checked_weight(weigh: WeightProvider, edit: Edit, source: Sentence) -> Fraction:
    w = weigh(edit, source)
    if not 0 < w <= 2:
        raise ContractViolation(f"edit weight {w!r} outside (0, 2]")
    return Fraction(w)


def match_sentence(
    hyp_edits: Sequence[Edit],
    annotated: AnnotatedSentence,
    *,
    beta: float = DEFAULT_BETA,
    weigh: WeightProvider = unit_weight,
    annotator: int | None = None,
) -> SentenceMatch:
    """Match one sentence's hypothesis edits against the best (or a fixed) annotator."""
    hyp_by_key = {e.key: e for e in hyp_edits}
    beta2 = Fraction(beta) ** 2
    if annotator is not None:
        if annotator not in annotated.edits_by_annotator:
            raise ContractViolation(f"annotator {annotator} absent from sentence annotations")
        candidates = [(annotator, annotated.edits_by_annotator[annotator])]
    elif annotated.edits_by_annotator:
        candidates = sorted(annotated.edits_by_annotator.items())
    else:
        candidates = [(IMPLICIT_ANNOTATOR, ())]

    best: SentenceMatch | None = None
    best_key = None
    for ann, ref_edits in candidates:
        tp, fp, fn, m_ref, x_ref, m_hyp, x_hyp = _match_against(
            hyp_by_key, ref_edits, annotated.source, weigh
        )
        key = (_f_exact(tp, fp, fn, beta2), tp, -ann)
        if best is None or key > best_key:
            best = SentenceMatch(ann, tp, fp, fn, tuple(m_ref), tuple(x_ref),
                                 tuple(m_hyp), tuple(x_hyp))
            best_key = key
    assert best is not None
    return best


@dataclass(frozen=True)
class ScoreReport:
    """Corpus-level edit-match tallies with per-error-type breakdown."""

    tp: float
    fp: float
    fn: float
    precision: float
    recall: float
    f_beta: float
    beta: float = DEFAULT_BETA
    per_type: Mapping[ErrorTag, tuple[float, float, float]] = field(default_factory=dict)
    per_sentence: tuple[tuple[float, float, float], ...] = ()
    selected_annotators: tuple[int, ...] = ()


def _check_lengths(n_hyp: int, n_ref: int):
    if n_hyp != n_ref:
        raise ContractViolation(f"hypothesis count {n_hyp} != corpus size {n_ref}")


def score_pt_errant(
    hyp_edits: Sequence[Sequence[Edit]],
    refs: Corpus,
    weight_provider: WeightProvider = unit_weight,
    beta: float = DEFAULT_BETA,
    *,
    annotator: int | None = None,
) -> ScoreReport:
    """Weighted edit-match F-beta; unit weights reduce it to plain F-beta."""
    _check_lengths(len(hyp_edits), len(refs))
    beta2 = Fraction(beta) ** 2
    total_tp = total_fp = total_fn = Fraction(0)
    per_type: dict[ErrorTag, list[Fraction]] = {}
    per_sentence: list[tuple[float, float, float]] = []
    selected: list[int] = []

    def bucket(tag: ErrorTag):
        return per_type.setdefault(tag, [Fraction(0)] * 3)

    for edits, sent in zip(hyp_edits, refs):
        m = match_sentence(edits, sent, beta=beta, weigh=weight_provider,
                           annotator=annotator)
        total_tp += m.tp
        total_fp += m.fp
        total_fn += m.fn
        per_sentence.append((float(m.tp), float(m.fp), float(m.fn)))
        selected.append(m.annotator)
        # TP and FN are attributed to the reference tag, FP to the hypothesis tag.
        for e in m.matched_ref:
            bucket(e.tag)[0] += _checked_weight(weight_provider, e, sent.source)
        for e in m.missed_ref:
            bucket(e.tag)[2] += _checked_weight(weight_provider, e, sent.source)
        for e in m.spurious_hyp:
            bucket(e.tag)[1] += _checked_weight(weight_provider, e, sent.source)

    p, r, f = precision_recall_f(total_tp, total_fp, total_fn, beta)
    exact_f = _f_exact(total_tp, total_fp, total_fn, beta2)
    return ScoreReport(
        tp=float(total_tp), fp=float(total_fp), fn=float(total_fn),
        precision=float(p), recall=float(r), f_beta=float(exact_f), beta=beta,
        per_type={t: (float(v[0]), float(v[1]), float(v[2])) for t, v in per_type.items()},
        per_sentence=tuple(per_sentence),
        selected_annotators=tuple(selected),
    )


def score_errant(
    hyp_edits: Sequence[Sequence[Edit]],
    refs: Corpus,
    beta: float = DEFAULT_BETA,
    *,
    annotator: int | None = None,
) -> ScoreReport:
    """Edit-match F-beta with per-sentence best-annotator selection."""
    return score_pt_errant(hyp_edits, refs, unit_weight, beta, annotator=annotator)


# --- GLEU --------------------------------------------------------------------


@dataclass(frozen=True)
class GleuReport:
    corpus_score: float
    per_sentence: tuple[float, ...]
    n_max: int = 4
    brevity_penalty: float = 1.0


def _ngram_counts(tokens: Sequence[str], n: int) -> dict[tuple[str, ...], int]:
    counts: dict[tuple[str, ...], int] = {}
    for i in range(len(tokens) - n + 1):
        g = tuple(tokens[i:i + n])
        counts[g] = counts.get(g, 0) + 1
    return counts


def gleu_sentence_counts(
    source: Sentence,
    hypothesis: Sentence,
    references: Sequence[Sentence],
    n_max: int = 4,
) -> tuple:
    """Additive per-sentence GLEU contributions, one entry per reference set.

    Each entry is (numerators, denominators, hyp_len, ref_len); summing these
    element-wise over sentences and applying :func:`gleu_from_counts` yields
    the corpus score. The per-order numerator rewards n-grams shared with the
    reference and subtracts hypothesis n-grams that survive from the source
    despite the reference dropping them, floored at zero.
    """
    entries = []
    for ref in references:
        nums, dens = [], []
        for n in range(1, n_max + 1):
            hyp_c = _ngram_counts(hypothesis.tokens, n)
            ref_c = _ngram_counts(ref.tokens, n)
            src_c = _ngram_counts(source.tokens, n)
            matches = sum(min(c, ref_c.get(g, 0)) for g, c in hyp_c.items())
            penalty = sum(
                min(c, src_c.get(g, 0)) for g, c in hyp_c.items() if g not in ref_c
            )
            nums.append(max(0, matches - penalty))
            dens.append(max(0, len(hypothesis) - n + 1))
        entries.append((tuple(nums), tuple(dens), len(hypothesis), len(ref)))
    return tuple(entries)


def _score_one_set(nums, dens, h: int, r: int) -> tuple[float, float]:
    """(score, brevity_penalty) from summed per-order counts of one reference set."""
    log_sum, orders = 0.0, 0
    for num, den in zip(nums, dens):
        if den == 0:
            continue  # order longer than every hypothesis sentence: no evidence
        orders += 1
        if num == 0:
            return 0.0, _brevity(h, r)
        log_sum += math.log(num / den)
    bp = _brevity(h, r)
    if orders == 0:
        return 0.0, bp
    return bp * math.exp(log_sum / orders), bp


def _brevity(h: int, r: int) -> float:
    if h >= r:
        return 1.0
    if h == 0:
        return 0.0
    return math.exp(1.0 - r / h)


def gleu_from_counts(summed: Sequence) -> float:
    """Mean per-reference-set score from element-wise summed sentence counts."""
    scores = [_score_one_set(nums, dens, h, r) for nums, dens, h, r in summed]
    return sum(s for s, _ in scores) / len(scores)


def sum_gleu_counts(contributions: Iterable[tuple]) -> list:
    """Element-wise sum of per-sentence contribution tuples."""
    total: list | None = None
    for contrib in contributions:
        if total is None:
            total = [
                [list(nums), list(dens), h, r] for nums, dens, h, r in contrib
            ]
            continue
        for acc, (nums, dens, h, r) in zip(total, contrib):
            acc[0] = [a + b for a, b in zip(acc[0], nums)]
            acc[1] = [a + b for a, b in zip(acc[1], dens)]
            acc[2] += h
            acc[3] += r
    if total is None:
        raise ContractViolation("empty hypothesis corpus")
    return total


def score_gleu(
    sources: Sequence[Sentence],
    hypotheses: Sequence[Sentence],
    references: Sequence[Sequence[Sentence]],
    n_max: int = 4,
) -> GleuReport:
    """Corpus GLEU; with several reference sets, the mean of per-set scores.

    Corpus scoring is unsmoothed (any zero per-order precision zeroes the
    score). The per-sentence diagnostics apply add-one smoothing for orders
    at least 2 so short sentences still get informative values.
    """
    if not hypotheses:
        raise ContractViolation("empty hypothesis corpus")
    if not references:
        raise ContractViolation("at least one reference set is required")
    _check_lengths(len(hypotheses), len(sources))
    for ref_set in references:
        _check_lengths(len(hypotheses), len(ref_set))

    per_sentence_counts = [
        gleu_sentence_counts(src, hyp, [ref_set[i] for ref_set in references], n_max)
        for i, (src, hyp) in enumerate(zip(sources, hypotheses))
    ]
    summed = sum_gleu_counts(per_sentence_counts)
    set_scores = [_score_one_set(nums, dens, h, r) for nums, dens, h, r in summed]
    corpus_score = sum(s for s, _ in set_scores) / len(set_scores)
    mean_bp = sum(bp for _, bp in set_scores) / len(set_scores)

    per_sentence = tuple(
        _smoothed_sentence_score(contrib) for contrib in per_sentence_counts
    )
    return GleuReport(corpus_score=corpus_score, per_sentence=per_sentence,
                      n_max=n_max, brevity_penalty=mean_bp)


def _smoothed_sentence_score(contrib: tuple) -> float:
    scores = []
    for nums, dens, h, r in contrib:
        log_sum, orders = 0.0, 0
        score = None
        for n, (num, den) in enumerate(zip(nums, dens), start=1):
            if n >= 2:
                num, den = num + 1, den + 1
            elif den == 0:
                continue
            if num == 0:
                score = 0.0
                break
            orders += 1
            log_sum += math.log(num / den)
        if score is None:
            score = _brevity(h, r) * math.exp(log_sum / orders) if orders else 0.0
        else:
            score *= _brevity(h, r)
        scores.append(score)
    return sum(scores) / len(scores)


# --- Scribendi-style reference-free score ------------------------------------


@dataclass(frozen=True)
class ScribendiReport:
    score: float
    per_sentence: tuple[int, ...]


def token_levenshtein_ratio(a: Sentence, b: Sentence) -> float:
    from .extraction import levenshtein

    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a.tokens, b.tokens) / longest


def token_sort_ratio(a: Sentence, b: Sentence) -> float:
    return token_levenshtein_ratio(
        Sentence(tuple(sorted(a.tokens))), Sentence(tuple(sorted(b.tokens)))
    )


def score_scribendi(
    sources: Sequence[Sentence],
    hypotheses: Sequence[Sentence],
    ppl: PerplexityProvider,
    *,
    similarity_threshold: float = 0.8,
) -> ScribendiReport:
    """Reference-free {-1, 0, +1} score per sentence and its corpus mean.

    Identity hypotheses score 0; a hypothesis must lower perplexity AND stay
    token-similar to the source to earn +1 — heavy rewrites are penalized
    even when fluent.
    """
    _check_lengths(len(hypotheses), len(sources))
    if not hypotheses:
        raise ContractViolation("empty hypothesis corpus")
    scores = []
    for i, (src, hyp) in enumerate(zip(sources, hypotheses)):
        if src == hyp:
            scores.append(0)
            continue
        try:
            hyp_ppl = ppl.perplexity(hyp)
            src_ppl = ppl.perplexity(src)
        except Exception as exc:
            raise GecEvalError(f"perplexity provider failed at sentence {i}: {exc}") from exc
        if hyp_ppl >= src_ppl:
            scores.append(-1)
            continue
        similarity = max(token_levenshtein_ratio(src, hyp), token_sort_ratio(src, hyp))
        scores.append(1 if similarity >= similarity_threshold else -1)
    return ScribendiReport(score=sum(scores) / len(scores), per_sentence=tuple(scores))
