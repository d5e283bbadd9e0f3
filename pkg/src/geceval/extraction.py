"""Token alignment, span-edit extraction, and rule-based error classification.

The aligner is a Levenshtein-style dynamic program with linguistically
weighted substitution costs and adjacent-pair transposition; contiguous
non-match regions merge into single edits (no rule-based re-splitting), so
extraction and :func:`geceval.corpus.apply_edits` are exact inverses.

Classification is lexicon- and morphology-based — no POS tagger dependency.
Callers holding externally computed POS tags may pass them through the
``source_pos``/``hyp_pos`` side channel to override the suffix heuristics
for content-word categories.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from . import lexicons
from .corpus import Edit, ErrorTag, Operation, Sentence


class OpKind(enum.Enum):
    MATCH = "M"
    SUBSTITUTE = "S"
    INSERT = "I"
    DELETE = "D"
    TRANSPOSE = "T"


@dataclass(frozen=True)
class AlignmentOp:
    """One aligned region: source span [s, e) paired with hypothesis span [s', e')."""

    kind: OpKind
    source_span: tuple[int, int]
    hyp_span: tuple[int, int]


# Deterministic tie-break at equal cost, most preferred first.
_PRIORITY = {
    OpKind.MATCH: 0,
    OpKind.SUBSTITUTE: 1,
    OpKind.DELETE: 2,
    OpKind.INSERT: 3,
    OpKind.TRANSPOSE: 4,
}

_INDEL_COST = 1.0
_TRANSPOSE_COST = 1.5


def _substitution_cost(a: str, b: str) -> float:
    if a == b:
        return 0.0
    la, lb = a.lower(), b.lower()
    if la == lb:
        return 0.1
    shorter, longer = (la, lb) if len(la) <= len(lb) else (lb, la)
    # One token extends the other and the shared prefix is at least half of it.
    if longer.startswith(shorter) and 2 * len(shorter) >= len(longer):
        return 0.5
    return 1.0


def _dp(src: Sequence[str], hyp: Sequence[str]):
    n, m = len(src), len(hyp)
    worst = (float("inf"), len(_PRIORITY))
    cost = [[0.0] * (m + 1) for _ in range(n + 1)]
    back: list[list[OpKind | None]] = [[None] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        for j in range(m + 1):
            if i == 0 and j == 0:
                continue
            best, choice = worst, None
            if i and j:
                kind = OpKind.MATCH if src[i - 1] == hyp[j - 1] else OpKind.SUBSTITUTE
                cand = (cost[i - 1][j - 1] + _substitution_cost(src[i - 1], hyp[j - 1]),
                        _PRIORITY[kind])
                if cand < best:
                    best, choice = cand, kind
            if i:
                cand = (cost[i - 1][j] + _INDEL_COST, _PRIORITY[OpKind.DELETE])
                if cand < best:
                    best, choice = cand, OpKind.DELETE
            if j:
                cand = (cost[i][j - 1] + _INDEL_COST, _PRIORITY[OpKind.INSERT])
                if cand < best:
                    best, choice = cand, OpKind.INSERT
            if (i > 1 and j > 1 and src[i - 2] == hyp[j - 1]
                    and src[i - 1] == hyp[j - 2] and src[i - 2] != src[i - 1]):
                cand = (cost[i - 2][j - 2] + _TRANSPOSE_COST, _PRIORITY[OpKind.TRANSPOSE])
                if cand < best:
                    best, choice = cand, OpKind.TRANSPOSE
            cost[i][j], back[i][j] = best[0], choice
    return cost, back


def alignment_cost(source: Sentence, hypothesis: Sentence) -> float:
    """Total cost of the minimal alignment (diagnostic; symmetric in its arguments)."""
    cost, _ = _dp(source.tokens, hypothesis.tokens)
    return cost[len(source)][len(hypothesis)]


def align(source: Sentence, hypothesis: Sentence) -> tuple[AlignmentOp, ...]:
    """Minimal-cost token alignment; runs of matches merge into one Match op."""
    _, back = _dp(source.tokens, hypothesis.tokens)
    ops: list[AlignmentOp] = []
    i, j = len(source), len(hypothesis)
    while i or j:
        kind = back[i][j]
        if kind in (OpKind.MATCH, OpKind.SUBSTITUTE):
            ops.append(AlignmentOp(kind, (i - 1, i), (j - 1, j)))
            i, j = i - 1, j - 1
        elif kind is OpKind.DELETE:
            ops.append(AlignmentOp(kind, (i - 1, i), (j, j)))
            i -= 1
        elif kind is OpKind.INSERT:
            ops.append(AlignmentOp(kind, (i, i), (j - 1, j)))
            j -= 1
        else:
            ops.append(AlignmentOp(OpKind.TRANSPOSE, (i - 2, i), (j - 2, j)))
            i, j = i - 2, j - 2
    ops.reverse()

    merged: list[AlignmentOp] = []
    for op in ops:
        if merged and op.kind is OpKind.MATCH and merged[-1].kind is OpKind.MATCH:
            prev = merged[-1]
            merged[-1] = AlignmentOp(
                OpKind.MATCH,
                (prev.source_span[0], op.source_span[1]),
                (prev.hyp_span[0], op.hyp_span[1]),
            )
        else:
            merged.append(op)
    return tuple(merged)


# --- classification ----------------------------------------------------------

# Every category this classifier can emit (the analysis module's closed set is
# this plus whatever tags arrive in reference files).
EMITTABLE_CATEGORIES = frozenset({
    "PUNCT", "DET", "PREP", "CONJ", "ORTH", "NOUN:NUM", "VERB:SVA", "VERB:FORM",
    "SPELL", "MORPH", "NOUN", "VERB", "ADJ", "ADV", "OTHER",
})

_POS_OVERRIDABLE = ("NOUN", "VERB", "ADJ", "ADV")

# Suppletive verb paradigms the suffix rules cannot reach.
_IRREGULAR_VERB_GROUPS = (
    frozenset({"be", "am", "is", "are", "was", "were", "been", "being"}),
    frozenset({"have", "has", "had", "having"}),
    frozenset({"do", "does", "did", "done", "doing"}),
    frozenset({"go", "goes", "went", "gone", "going"}),
)
_THIRD_PERSON_FORMS = frozenset({"is", "was", "has", "does", "goes"})

_VERB_SUFFIXES = ("ing", "ed", "es", "en", "s")

_DERIVATIONAL_SUFFIXES = (
    "ation", "ition", "ment", "ness", "ance", "ence", "able", "ible", "tion",
    "sion", "ity", "ous", "ful", "less", "ish", "ive", "ize", "ise", "ant",
    "ent", "al", "ic", "ly", "er", "or", "y",
)


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Plain edit distance between two sequences (used on both chars and tokens)."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i]
        for j, y in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[-1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def _s_es_stem(a: str, b: str) -> str | None:
    """Stem when one token is the other plus -s/-es, else None."""
    for x, y in ((a, b), (b, a)):
        if y == x + "s" or y == x + "es":
            return x
    return None


def _verb_stems(w: str) -> set[str]:
    stems = {w}
    for sfx in _VERB_SUFFIXES:
        if w.endswith(sfx) and len(w) - len(sfx) >= 2:
            stem = w[: -len(sfx)]
            stems.add(stem)
            if not stem.endswith("e"):
                stems.add(stem + "e")  # e-drop: make/making
            if len(stem) >= 2 and stem[-1] == stem[-2]:
                stems.add(stem[:-1])  # consonant doubling: stop/stopped
    return stems


def _derivational_stem(w: str) -> str | None:
    for sfx in _DERIVATIONAL_SUFFIXES:
        if w.endswith(sfx) and len(w) - len(sfx) >= 3:
            return w[: -len(sfx)]
    return None


def _single_token_category(a: str, b: str, pos: str | None) -> str | None:
    la, lb = a.lower(), b.lower()
    stem = _s_es_stem(la, lb)
    if stem is not None:
        if pos == "NOUN":
            return "NOUN:NUM"
        if pos == "VERB":
            return "VERB:SVA"
        return "VERB:SVA" if stem in lexicons.verbs() else "NOUN:NUM"
    for group in _IRREGULAR_VERB_GROUPS:
        if la in group and lb in group:
            third = _THIRD_PERSON_FORMS
            return "VERB:SVA" if (la in third) != (lb in third) else "VERB:FORM"
    if _verb_stems(la) & _verb_stems(lb):
        return "VERB:FORM"
    if (min(len(la), len(lb)) >= 4 and la[0] == lb[0]
            and levenshtein(la, lb) <= 2):
        return "SPELL"
    sa, sb = _derivational_stem(la), _derivational_stem(lb)
    if (sa is not None and sa == sb) or sa == lb or sb == la:
        return "MORPH"
    if pos in _POS_OVERRIDABLE:
        return pos
    return None


def _categorize(
    src_tokens: Sequence[str],
    repl_tokens: Sequence[str],
    src_pos: Sequence[str] | None = None,
    repl_pos: Sequence[str] | None = None,
) -> str:
    involved = [*src_tokens, *repl_tokens]
    if involved and all(lexicons.is_punct(t) for t in involved):
        return "PUNCT"
    low = [t.lower() for t in involved]
    for lexicon, category in (
        (lexicons.determiners(), "DET"),
        (lexicons.prepositions(), "PREP"),
        (lexicons.conjunctions(), "CONJ"),
    ):
        if all(t in lexicon for t in low):
            return category
    if (src_tokens and repl_tokens
            and " ".join(src_tokens).lower() == " ".join(repl_tokens).lower()):
        return "ORTH"
    if len(src_tokens) == 1 and len(repl_tokens) == 1:
        pos = None
        if src_pos and repl_pos and src_pos[0] == repl_pos[0]:
            pos = src_pos[0]
        category = _single_token_category(src_tokens[0], repl_tokens[0], pos)
        if category:
            return category
    else:
        # One-sided edits carry a single usable POS tag.
        tags = list(src_pos or []) + list(repl_pos or [])
        if tags and len(set(tags)) == 1 and tags[0] in _POS_OVERRIDABLE:
            return tags[0]
    return "OTHER"


def _operation(start: int, end: int, replacement: Sequence[str]) -> Operation:
    if start == end:
        return Operation.MISSING
    if not replacement:
        return Operation.UNNECESSARY
    return Operation.REPLACEMENT


def extract_edits(
    source: Sentence,
    hypothesis: Sentence,
    *,
    annotator: int = 0,
    source_pos: Sequence[str] | None = None,
    hyp_pos: Sequence[str] | None = None,
) -> tuple[Edit, ...]:
    """Extract classified edits: one Edit per maximal non-match alignment run."""
    edits: list[Edit] = []
    run: list[AlignmentOp] = []

    def flush():
        if not run:
            return
        start, end = run[0].source_span[0], run[-1].source_span[1]
        h0, h1 = run[0].hyp_span[0], run[-1].hyp_span[1]
        replacement = hypothesis.tokens[h0:h1]
        category = _categorize(
            source.tokens[start:end],
            replacement,
            source_pos[start:end] if source_pos else None,
            hyp_pos[h0:h1] if hyp_pos else None,
        )
        op = _operation(start, end, replacement)
        edits.append(Edit(start, end, replacement, ErrorTag(op, category), annotator))
        run.clear()

    for op in align(source, hypothesis):
        if op.kind is OpKind.MATCH:
            flush()
        else:
            run.append(op)
    flush()
    return tuple(edits)


def classify(
    edit: Edit,
    source: Sentence,
    hypothesis: Sentence | None = None,
    *,
    source_pos: Sequence[str] | None = None,
    hyp_pos: Sequence[str] | None = None,
) -> ErrorTag:
    """(Re)classify an extracted edit against its source.

    ``hypothesis`` plus ``hyp_pos`` lets the replacement tokens pick up their
    POS tags: the edit is located in the hypothesis by re-running extraction.
    """
    if hypothesis is not None and hyp_pos is not None:
        for other in extract_edits(source, hypothesis, source_pos=source_pos, hyp_pos=hyp_pos):
            if other.key == edit.key:
                return other.tag
    category = _categorize(
        source.tokens[edit.start:edit.end],
        edit.replacement,
        source_pos[edit.start:edit.end] if source_pos else None,
        None,
    )
    return ErrorTag(_operation(edit.start, edit.end, edit.replacement), category)
