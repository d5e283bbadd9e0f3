"""Tokenized sentences, span edits, and the M2 annotation format.

Offsets are token-based throughout, matching the M2 convention: an edit
replaces source tokens ``[start, end)`` with a (possibly empty) replacement
token sequence. Insertions have ``start == end``; the conventional "noop"
line (``start == end == -1``) marks an annotator who left the sentence
unchanged and is represented as an annotator with an empty edit sequence.

All values are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import ContractViolation, M2ParseError

NOOP_OFFSET = -1

def _check_token(surface: str) -> str:
    if not surface:
        raise ContractViolation("token surface must be non-empty")
    parts = surface.split()
    if len(parts) != 1 or parts[0] != surface:
        raise ContractViolation(f"token may not contain whitespace: {surface!r}")
    return surface


@dataclass(frozen=True)
class Sentence:
    """An ordered sequence of whitespace-free tokens."""

    tokens: tuple[str, ...] = ()

    def __post_init__(self):
        for tok in self.tokens:
            _check_token(tok)

    @classmethod
    def from_text(cls, text: str) -> "Sentence":
        """Tokenize a space-separated line (pre-tokenized text, never raw prose)."""
        return cls(tuple(text.split()))

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)

    def __getitem__(self, item):
        return self.tokens[item]


class Operation(enum.Enum):
    MISSING = "M"
    REPLACEMENT = "R"
    UNNECESSARY = "U"
    UNKNOWN = "UNK"
    NOOP = "noop"


@dataclass(frozen=True)
class ErrorTag:
    """An edit operation plus an error category, e.g. ``R:VERB:SVA``."""

    operation: Operation
    category: str = ""

    def render(self) -> str:
        if self.operation is Operation.NOOP:
            return "noop"
        if self.operation is Operation.UNKNOWN:
            return self.category or "UNK"
        return f"{self.operation.value}:{self.category}"

    @classmethod
    def parse(cls, text: str) -> "ErrorTag":
        if text == "noop":
            return cls(Operation.NOOP)
        if text == "UNK":
            return cls(Operation.UNKNOWN)
        if len(text) > 2 and text[1] == ":" and text[0] in ("M", "R", "U"):
            return cls(Operation(text[0]), text[2:])
        # Tag with no recognizable operation prefix (e.g. legacy CoNLL
        # categories like "Vt"): keep it, classified as unknown operation.
        return cls(Operation.UNKNOWN, text)

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Edit:
    """A span correction over a tokenized source sentence.

    ``required`` and ``comment`` mirror the corresponding M2 fields; they are
    preserved for byte-exact round-trips but ignored by all scoring, which
    matches edits on ``(start, end, replacement)`` only.
    """

    start: int
    end: int
    replacement: tuple[str, ...]
    tag: ErrorTag
    annotator: int = 0
    required: str = "REQUIRED"
    comment: str = "-NONE-"

    def __post_init__(self):
        for tok in self.replacement:
            _check_token(tok)
        if self.annotator < 0:
            raise ContractViolation("annotator id must be non-negative")
        if self.tag.operation is Operation.NOOP:
            if not (self.start == self.end == NOOP_OFFSET and not self.replacement):
                raise ContractViolation("noop edit must be (-1, -1) with empty replacement")
            return
        if self.start == self.end == NOOP_OFFSET:
            raise ContractViolation("(-1, -1) offsets are reserved for noop edits")
        if not (0 <= self.start <= self.end):
            raise ContractViolation(f"bad span ({self.start}, {self.end})")
        op = self.tag.operation
        if op is Operation.MISSING and not (self.start == self.end and self.replacement):
            raise ContractViolation("Missing edit must be an insertion with a replacement")
        if op is Operation.UNNECESSARY and not (self.start < self.end and not self.replacement):
            raise ContractViolation("Unnecessary edit must delete a non-empty span")
        if op is Operation.REPLACEMENT and not (self.start < self.end and self.replacement):
            raise ContractViolation("Replacement edit must rewrite a non-empty span")

    @property
    def key(self) -> tuple[int, int, tuple[str, ...]]:
        """Matching identity used by all scorers: span plus replacement, tag-blind."""
        return (self.start, self.end, self.replacement)

    @property
    def is_insertion(self) -> bool:
        return self.start == self.end


def edits_overlap(a: Edit, b: Edit) -> bool:
    """True when two edits cannot be applied to the same source together.

    An insertion at position p conflicts with a span (s, e) iff s <= p < e,
    so an insertion exactly at the end of a preceding span is fine. Two
    insertions at the same position conflict (their order is ambiguous).
    """
    if a.is_insertion and b.is_insertion:
        return a.start == b.start
    if a.is_insertion:
        return b.start <= a.start < b.end
    if b.is_insertion:
        return a.start <= b.start < a.end
    return a.start < b.end and b.start < a.end


def _check_edit_sequence(edits: Iterable[Edit], source_len: int) -> tuple[Edit, ...]:
    ordered = tuple(edits)
    prev: Edit | None = None
    for e in ordered:
        if e.end > source_len:
            raise ContractViolation(
                f"edit ({e.start}, {e.end}) out of range for {source_len}-token sentence"
            )
        if prev is not None:
            if (e.start, e.end) < (prev.start, prev.end):
                raise ContractViolation("edits must be sorted by (start, end)")
            if edits_overlap(prev, e):
                raise ContractViolation(
                    f"overlapping edits ({prev.start}, {prev.end}) and ({e.start}, {e.end})"
                )
        prev = e
    return ordered


@dataclass(frozen=True)
class AnnotatedSentence:
    """A source sentence plus per-annotator gold edit sets.

    An annotator mapped to an empty tuple was present in the file with a
    noop line: the sentence is a valid reference as-is for that annotator.
    """

    source: Sentence
    edits_by_annotator: Mapping[int, tuple[Edit, ...]] = field(default_factory=dict)

    def __post_init__(self):
        frozen = {
            ann: _check_edit_sequence(edits, len(self.source))
            for ann, edits in sorted(self.edits_by_annotator.items())
        }
        object.__setattr__(self, "edits_by_annotator", frozen)

    @property
    def annotators(self) -> tuple[int, ...]:
        return tuple(self.edits_by_annotator)

    def correction(self, annotator: int) -> Sentence:
        """The reference sentence produced by one annotator's edits."""
        return apply_edits(self.source, self.edits_by_annotator[annotator])


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[AnnotatedSentence, ...] = ()

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[AnnotatedSentence]:
        return iter(self.sentences)

    def __getitem__(self, i: int) -> AnnotatedSentence:
        return self.sentences[i]

    @property
    def sources(self) -> list[Sentence]:
        return [s.source for s in self.sentences]


def apply_edits(source: Sentence, edits: Iterable[Edit]) -> Sentence:
    """Apply sorted, non-overlapping edits to a source sentence.

    Splices right-to-left so earlier offsets stay valid. Raises
    ContractViolation on overlapping or out-of-range edits.
    """
    ordered = _check_edit_sequence(edits, len(source))
    tokens = list(source.tokens)
    for e in reversed(ordered):
        tokens[e.start : e.end] = e.replacement
    return Sentence(tuple(tokens))


# --- M2 parsing and serialization -------------------------------------------

_NOOP_TAG = ErrorTag(Operation.NOOP)


def _parse_a_line(line: str, lineno: int, source_len: int) -> tuple[int, Edit | None]:
    """Parse one "A " line. Returns (annotator, edit); edit is None for noop."""
    body = line[2:]
    fields = body.split("|||")
    if len(fields) != 6:
        raise M2ParseError(
            f"expected 6 '|||'-separated fields in edit line, got {len(fields)}", lineno
        )
    span, tag_text, replacement_text, required, comment, annotator_text = fields
    parts = span.split()
    if len(parts) != 2:
        raise M2ParseError(f"edit span must be two offsets, got {span!r}", lineno)
    try:
        start, end = int(parts[0]), int(parts[1])
    except ValueError:
        raise M2ParseError(f"non-integer edit offsets {span!r}", lineno) from None
    try:
        annotator = int(annotator_text)
    except ValueError:
        raise M2ParseError(f"non-integer annotator id {annotator_text!r}", lineno) from None
    if annotator < 0:
        raise M2ParseError(f"negative annotator id {annotator}", lineno)

    tag = ErrorTag.parse(tag_text)
    if tag.operation is Operation.NOOP:
        if (start, end) != (NOOP_OFFSET, NOOP_OFFSET):
            raise M2ParseError("noop edit must have offsets -1 -1", lineno)
        return annotator, None

    if start == end == NOOP_OFFSET:
        raise M2ParseError("offsets -1 -1 are only valid for noop edits", lineno)
    if not (0 <= start <= end <= source_len):
        raise M2ParseError(
            f"edit span ({start}, {end}) invalid for {source_len}-token sentence", lineno
        )
    replacement = () if replacement_text == "-NONE-" else tuple(replacement_text.split())
    try:
        edit = Edit(start, end, replacement, tag, annotator, required, comment)
    except ContractViolation as exc:
        raise M2ParseError(str(exc), lineno) from None
    return annotator, edit


def _finish_block(
    source: Sentence,
    raw_edits: dict[int, list[tuple[int, Edit]]],
    noop_lines: dict[int, int],
) -> AnnotatedSentence:
    edits_by_annotator: dict[int, tuple[Edit, ...]] = {}
    for ann, noop_line in noop_lines.items():
        if raw_edits.get(ann):
            raise M2ParseError(
                f"annotator {ann} has both a noop line and edit lines", noop_line
            )
        edits_by_annotator[ann] = ()
    for ann, numbered in raw_edits.items():
        # Collapse exact duplicates; conflicting overlaps are a hard error.
        seen: dict[tuple, tuple[int, Edit]] = {}
        for lineno, e in numbered:
            full_key = (e.key, e.tag, e.required, e.comment)
            seen.setdefault(full_key, (lineno, e))
        ordered = sorted(seen.values(), key=lambda pair: (pair[1].start, pair[1].end))
        for (_, prev), (nxt_line, nxt) in zip(ordered, ordered[1:]):
            if edits_overlap(prev, nxt):
                raise M2ParseError(
                    f"annotator {ann} has overlapping edits "
                    f"({prev.start}, {prev.end}) and ({nxt.start}, {nxt.end})",
                    nxt_line,
                )
        edits_by_annotator[ann] = tuple(e for _, e in ordered)
    return AnnotatedSentence(source, edits_by_annotator)


def parse_m2(text: str) -> Corpus:
    """Parse M2-format text into a Corpus.

    Blocks are separated by blank lines; each block is one "S " source line
    followed by zero or more "A " edit lines. Raises M2ParseError (with the
    offending line number) on any malformed block.
    """
    sentences: list[AnnotatedSentence] = []
    source: Sentence | None = None
    raw_edits: dict[int, list[tuple[int, Edit]]] = {}
    noop_lines: dict[int, int] = {}

    def close_block():
        nonlocal source
        if source is not None:
            sentences.append(_finish_block(source, raw_edits, noop_lines))
            source = None
            raw_edits.clear()
            noop_lines.clear()

    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line.strip():
            close_block()
            continue
        if line.startswith("S ") or line == "S":
            if source is not None:
                raise M2ParseError("block has more than one source line", lineno)
            try:
                source = Sentence.from_text(line[2:])
            except ContractViolation as exc:
                raise M2ParseError(str(exc), lineno) from None
        elif line.startswith("A "):
            if source is None:
                raise M2ParseError("edit line before any source line", lineno)
            annotator, edit = _parse_a_line(line, lineno, len(source))
            if edit is None:
                noop_lines.setdefault(annotator, lineno)
            else:
                raw_edits.setdefault(annotator, []).append((lineno, edit))
        else:
            raise M2ParseError(f"unrecognized line {line[:40]!r}", lineno)
    close_block()
    return Corpus(tuple(sentences))


def _format_edit(edit: Edit) -> str:
    replacement = " ".join(edit.replacement) if edit.replacement else "-NONE-"
    return (
        f"A {edit.start} {edit.end}|||{edit.tag.render()}|||{replacement}"
        f"|||{edit.required}|||{edit.comment}|||{edit.annotator}"
    )


def write_m2(corpus: Corpus) -> str:
    """Serialize a Corpus to canonical M2 text (inverse of parse_m2).

    Annotators are emitted in ascending id order; an annotator with zero
    edits produces the conventional noop line. Blocks are separated by
    exactly one blank line.
    """
    blocks: list[str] = []
    for sent in corpus:
        # A degenerate empty source serializes as a bare "S" (no trailing space).
        lines = [f"S {sent.source.text}" if sent.source.tokens else "S"]
        for ann in sorted(sent.edits_by_annotator):
            edits = sent.edits_by_annotator[ann]
            if not edits:
                lines.append(f"A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||{ann}")
            else:
                lines.extend(_format_edit(e) for e in edits)
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def read_hypothesis_file(text: str) -> list[Sentence]:
    """Read a plain-text hypothesis file: one space-tokenized sentence per line."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [Sentence.from_text(line) for line in lines]


def write_sentences(sentences: Iterable[Sentence]) -> str:
    return "".join(s.text + "\n" for s in sentences)
