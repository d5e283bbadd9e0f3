"""Append-only JSONL event log for the adjudication store.

The store on disk is a sequence of events, one JSON object per line; all
case state is a pure fold over that sequence, so restarting a service and
refolding the file reproduces the exact in-memory state. Sequence numbers
are dense from 1 and verified on read. Writes are flushed and fsynced
before the append call returns.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping

from .corpus import Sentence
from .errors import AdjudicationError, ContractViolation
from .judge import (
    CaseStatus,
    JudgeCase,
    JudgmentVerdict,
    PanelOrder,
    apply_human_verdict,
    apply_resolution,
)


class EventKind(Enum):
    CASE_CREATED = "CaseCreated"
    LLM_VERDICTS = "LlmVerdicts"
    HUMAN_VERDICT = "HumanVerdict"
    RESOLUTION = "Resolution"


@dataclass(frozen=True)
class CaseEvent:
    sequence_number: int
    timestamp: str
    kind: EventKind
    payload: Mapping[str, Any]


def case_created_payload(case: JudgeCase) -> dict:
    return {
        "case_id": case.id,
        "source": case.source.text,
        "gold": case.gold_correction.text,
        "model": case.model_correction.text,
        "panel_order": case.panel_order.value,
    }


def llm_verdicts_payload(case: JudgeCase) -> dict:
    return {
        "case_id": case.id,
        "verdicts": {jid: v.value for jid, v in case.llm_verdicts.items()},
        "raw": dict(case.llm_raw),
        "status": case.status.value,
        "final": case.final.value if case.final is not None else None,
        "error": case.error,
    }


def human_verdict_payload(case_id: str, annotator_id: str,
                          verdict: JudgmentVerdict) -> dict:
    return {"case_id": case_id, "annotator_id": annotator_id,
            "verdict": verdict.value}


def resolution_payload(case_id: str, verdict: JudgmentVerdict) -> dict:
    return {"case_id": case_id, "verdict": verdict.value}


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def encode_event(event: CaseEvent) -> str:
    record = {"seq": event.sequence_number, "ts": event.timestamp,
              "kind": event.kind.value, "payload": dict(event.payload)}
    return json.dumps(record, ensure_ascii=False, sort_keys=True)


def decode_event(line: str, lineno: int) -> CaseEvent:
    try:
        record = json.loads(line)
        return CaseEvent(sequence_number=record["seq"], timestamp=record["ts"],
                         kind=EventKind(record["kind"]), payload=record["payload"])
    except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
        raise ContractViolation(f"corrupt event on line {lineno}: {exc}") from exc


def read_events(path: str | Path) -> list[CaseEvent]:
    path = Path(path)
    if not path.exists():
        return []
    events = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            event = decode_event(line, lineno)
            if event.sequence_number != len(events) + 1:
                raise ContractViolation(
                    f"line {lineno}: sequence number {event.sequence_number}, "
                    f"expected {len(events) + 1}")
            events.append(event)
    return events


def fold(events: Iterable[CaseEvent]) -> dict[str, JudgeCase]:
    """Rebuild the full case store from an event sequence."""
    cases: dict[str, JudgeCase] = {}

    def existing(case_id: str) -> JudgeCase:
        if case_id not in cases:
            raise AdjudicationError("unknown_case",
                                    f"event references unknown case {case_id}")
        return cases[case_id]

    for event in events:
        payload = event.payload
        if event.kind is EventKind.CASE_CREATED:
            cid = payload["case_id"]
            if cid in cases:
                raise ContractViolation(f"case {cid} created twice")
            cases[cid] = JudgeCase(
                id=cid,
                source=Sentence.from_text(payload["source"]),
                gold_correction=Sentence.from_text(payload["gold"]),
                model_correction=Sentence.from_text(payload["model"]),
                panel_order=PanelOrder(payload["panel_order"]),
            )
        elif event.kind is EventKind.LLM_VERDICTS:
            case = existing(payload["case_id"])
            if case.status is not CaseStatus.PENDING_LLM:
                raise ContractViolation(
                    f"LLM verdicts recorded twice for case {case.id}")
            cases[case.id] = replace(
                case,
                llm_verdicts={jid: JudgmentVerdict(v)
                              for jid, v in payload["verdicts"].items()},
                llm_raw=dict(payload["raw"]),
                status=CaseStatus(payload["status"]),
                final=(JudgmentVerdict(payload["final"])
                       if payload["final"] is not None else None),
                error=payload["error"],
            )
        elif event.kind is EventKind.HUMAN_VERDICT:
            case = existing(payload["case_id"])
            cases[case.id] = apply_human_verdict(
                case, payload["annotator_id"], JudgmentVerdict(payload["verdict"]))
        elif event.kind is EventKind.RESOLUTION:
            case = existing(payload["case_id"])
            cases[case.id] = apply_resolution(
                case, JudgmentVerdict(payload["verdict"]))
    return cases


class EventLog:
    """Single-writer append handle; callers serialize access themselves."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._next_seq = len(read_events(self.path)) + 1
        self._fh = self.path.open("a", encoding="utf-8")

    def append(self, kind: EventKind, payload: Mapping[str, Any],
               *, sync: bool = True) -> CaseEvent:
        event = CaseEvent(sequence_number=self._next_seq, timestamp=_now(),
                          kind=kind, payload=payload)
        self._fh.write(encode_event(event) + "\n")
        self._fh.flush()
        if sync:
            os.fsync(self._fh.fileno())
        self._next_seq += 1
        return event

    def append_many(self, items: Iterable[tuple[EventKind, Mapping[str, Any]]]
                    ) -> list[CaseEvent]:
        """Bulk append with a single fsync at the end."""
        events = [self.append(kind, payload, sync=False)
                  for kind, payload in items]
        os.fsync(self._fh.fileno())
        return events

    def close(self):
        self._fh.close()

    def __enter__(self) -> "EventLog":
        return self

    def __exit__(self, *exc_info):
        self.close()


def record_run(path: str | Path, cases: Iterable[JudgeCase]) -> int:
    """Persist a judge run (creation + LLM outcomes) as a fresh event stream."""
    cases = list(cases)
    items: list[tuple[EventKind, Mapping[str, Any]]] = []
    for case in cases:
        items.append((EventKind.CASE_CREATED, case_created_payload(case)))
    for case in cases:
        if case.status is not CaseStatus.PENDING_LLM:
            items.append((EventKind.LLM_VERDICTS, llm_verdicts_payload(case)))
    with EventLog(path) as log:
        log.append_many(items)
    return len(items)
