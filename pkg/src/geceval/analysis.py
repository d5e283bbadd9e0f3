"""Per-error-type behavioral profiles and cross-system profile correlation.

A profile answers, per tag: of the gold edits of this type (under the same
per-sentence annotator selection the scorer uses), what share did the system
produce exactly (correction rate), and of the system's own edits of this
type, what share matched nothing (false insertion rate, the complement of
type-level precision)? Matching is the scorer's tag-blind
(start, end, replacement) identity; only the attribution of a match to a row
uses tags — gold-side rows by the reference tag, system-side rows by the
hypothesis tag.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import Corpus, Edit
from .errors import ContractViolation, InsufficientData
from .metrics import _check_lengths, match_sentence
from .stats import CorrelationResult, spearman

# Percentages over fewer gold edits than this are reported but flagged.
LOW_SUPPORT_THRESHOLD = 5

PROFILE_COLUMNS = ("tag", "correction_rate", "false_insertion_rate",
                   "gold_count", "sys_count")
_ABSENT = "-"


@dataclass(frozen=True)
class ProfileRow:
    tag: str
    correction_rate: float | None
    false_insertion_rate: float | None
    gold_count: int
    sys_count: int

    @property
    def low_support(self) -> bool:
        return self.gold_count < LOW_SUPPORT_THRESHOLD


@dataclass(frozen=True)
class TypeProfile:
    rows: Mapping[str, ProfileRow]

    def tags(self) -> list[str]:
        return sorted(self.rows)


def profile_system(
    hyp_edits: Sequence[Sequence[Edit]],
    refs: Corpus,
    *,
    annotator: int | None = None,
) -> TypeProfile:
    """Tag-level correction and false-insertion rates for one system.

    Rates are only present where their denominator is: a tag the system never
    emits has no false-insertion rate, a tag absent from the selected gold
    annotations has no correction rate.
    """
    _check_lengths(len(hyp_edits), len(refs))
    gold: dict[str, int] = {}
    gold_matched: dict[str, int] = {}
    sys_total: dict[str, int] = {}
    sys_spurious: dict[str, int] = {}

    def tally(counter: dict[str, int], edit: Edit):
        tag = edit.tag.render()
        counter[tag] = counter.get(tag, 0) + 1

    for edits, sent in zip(hyp_edits, refs):
        m = match_sentence(edits, sent, annotator=annotator)
        for e in m.matched_ref:
            tally(gold, e)
            tally(gold_matched, e)
        for e in m.missed_ref:
            tally(gold, e)
        for e in m.matched_hyp:
            tally(sys_total, e)
        for e in m.spurious_hyp:
            tally(sys_total, e)
            tally(sys_spurious, e)

    rows = {}
    for tag in sorted(set(gold) | set(sys_total)):
        g, s = gold.get(tag, 0), sys_total.get(tag, 0)
        rows[tag] = ProfileRow(
            tag=tag,
            correction_rate=100 * gold_matched.get(tag, 0) / g if g else None,
            false_insertion_rate=100 * sys_spurious.get(tag, 0) / s if s else None,
            gold_count=g,
            sys_count=s,
        )
    return TypeProfile(rows=rows)


PROFILE_FIELDS = {"correction": "correction_rate",
                  "false_insertion": "false_insertion_rate"}


def correlate_profiles(
    a: TypeProfile, b: TypeProfile, field: str = "correction"
) -> CorrelationResult:
    """Spearman rho between two systems' per-tag rates over their common tags."""
    if field not in PROFILE_FIELDS:
        raise ContractViolation(
            f"field must be one of {sorted(PROFILE_FIELDS)}, got {field!r}")
    attr = PROFILE_FIELDS[field]
    xs, ys = [], []
    for tag in sorted(set(a.rows) & set(b.rows)):
        va = getattr(a.rows[tag], attr)
        vb = getattr(b.rows[tag], attr)
        if va is not None and vb is not None:
            xs.append(va)
            ys.append(vb)
    if len(xs) < 3:
        raise InsufficientData(
            f"need at least 3 common {field} rows, got {len(xs)}")
    return spearman(xs, ys)


def write_profile_tsv(profile: TypeProfile) -> str:
    """Serialize a profile as tab-separated values, one row per tag."""
    out = io.StringIO()
    writer = csv.writer(out, delimiter="\t", lineterminator="\n")
    writer.writerow(PROFILE_COLUMNS)
    for tag in profile.tags():
        row = profile.rows[tag]
        writer.writerow([
            row.tag,
            _ABSENT if row.correction_rate is None else repr(row.correction_rate),
            _ABSENT if row.false_insertion_rate is None
            else repr(row.false_insertion_rate),
            row.gold_count,
            row.sys_count,
        ])
    return out.getvalue()


def read_profile_tsv(text: str) -> TypeProfile:
    reader = csv.reader(io.StringIO(text), delimiter="\t")
    header = next(reader, None)
    if header != list(PROFILE_COLUMNS):
        raise ContractViolation(f"bad profile header: {header!r}")
    rows = {}
    for record in reader:
        if not record:
            continue
        if len(record) != len(PROFILE_COLUMNS):
            raise ContractViolation(f"bad profile row: {record!r}")
        tag, corr, fir, gold_count, sys_count = record
        rows[tag] = ProfileRow(
            tag=tag,
            correction_rate=None if corr == _ABSENT else float(corr),
            false_insertion_rate=None if fir == _ABSENT else float(fir),
            gold_count=int(gold_count),
            sys_count=int(sys_count),
        )
    return TypeProfile(rows=rows)
