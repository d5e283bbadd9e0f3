"""HTTP facade over the adjudication store.

Serves the human-annotation queue and statistics, accepts verdicts and
resolutions, and optionally hosts the static annotation UI. All writes go
through one lock and are durable (fsynced to the event log) before the
response is sent; every read works off state folded from that log, so a
restart reproduces identical responses.

Annotators only ever see blinded payloads: exactly
{case_id, source, option_a, option_b, status} — nothing that identifies
which option is the gold reference, and never judge identities or raw judge
output.
"""

from __future__ import annotations

import threading
from dataclasses import asdict
from pathlib import Path
from typing import Mapping

from fastapi import Depends, FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .errors import AdjudicationError
from .events import (
    EventKind,
    EventLog,
    fold,
    human_verdict_payload,
    read_events,
    resolution_payload,
)
from .judge import (
    CaseStatus,
    JudgeCase,
    JudgmentVerdict,
    apply_human_verdict,
    apply_resolution,
    verdict_from_option,
)
from .stats import cohen_kappa

SERVICE_TOKEN_ENV = "GECEVAL_SERVICE_TOKEN"

# AdjudicationError code -> HTTP status
_ERROR_STATUS = {
    "unknown_case": 404,
    "bad_verdict": 400,
    "duplicate_annotator": 409,
    "wrong_state": 409,
    "two_annotator_protocol": 409,
}


class _HttpError(Exception):
    """Internal carrier translated to a JSON error response."""

    def __init__(self, status: int, message: str, code: str | None = None):
        self.status = status
        self.message = message
        self.code = code


class JudgmentBody(BaseModel):
    annotator_id: str
    verdict: str  # OPTION_A | OPTION_B | TIE


class ResolutionBody(BaseModel):
    verdict: str  # OPTION_A | OPTION_B | TIE


def blinded_payload(case: JudgeCase) -> dict:
    option_a, option_b = case.blinded_options()
    return {
        "case_id": case.id,
        "source": case.source.text,
        "option_a": option_a,
        "option_b": option_b,
        "status": case.status.value,
    }


def compute_stats(cases: list[JudgeCase]) -> dict:
    """Live counters over the current store; pending work counts, not errors."""
    total = len(cases)
    by_status = {status.value: 0 for status in CaseStatus}
    for case in cases:
        by_status[case.status.value] += 1
    consensus = by_status[CaseStatus.CONSENSUS_FINAL.value]
    resolved = by_status[CaseStatus.RESOLVED.value]
    escalated = total - consensus - by_status[CaseStatus.PENDING_LLM.value]
    finished = [c for c in cases
                if c.status in (CaseStatus.CONSENSUS_FINAL, CaseStatus.RESOLVED)]

    distribution = {v.value: 0.0 for v in JudgmentVerdict}
    for case in finished:
        distribution[case.final.value] += 1
    if finished:
        distribution = {k: 100 * n / len(finished)
                        for k, n in distribution.items()}
    valid_or_preferred = (distribution[JudgmentVerdict.MODEL_PREFERRED.value]
                          + distribution[JudgmentVerdict.EQUALLY_VALID.value])

    judge_pairs = [c for c in cases if len(c.llm_verdicts) == 2]
    human_pairs = [c for c in cases if len(c.human_verdicts) == 2]
    judge_kappa = None
    if judge_pairs:
        ids = sorted(judge_pairs[0].llm_verdicts)
        judge_kappa = asdict(cohen_kappa(
            [c.llm_verdicts[ids[0]].value for c in judge_pairs],
            [c.llm_verdicts[ids[1]].value for c in judge_pairs]))
    human_kappa = None
    if human_pairs:
        pairs = [sorted(c.human_verdicts.items()) for c in human_pairs]
        human_kappa = asdict(cohen_kappa([p[0][1].value for p in pairs],
                                         [p[1][1].value for p in pairs]))

    return {
        "total_cases": total,
        "status_counts": by_status,
        "consensus_rate": consensus / total if total else 0.0,
        "escalation_rate": escalated / total if total else 0.0,
        "workload_reduction": consensus / total if total else 0.0,
        "escalation_progress": resolved / escalated if escalated else 0.0,
        "finished": len(finished),
        "final_distribution": distribution,
        "valid_or_preferred": valid_or_preferred,
        "judge_kappa": judge_kappa,
        "human_kappa": human_kappa,
    }


def create_app(
    store: str | Path,
    annotators: Mapping[str, str],
    *,
    token: str | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    """App factory; ``annotators`` maps annotator id to display name.

    ``token``, when given, is required as a bearer token on every /api
    request. The caller reads it from the environment — it never appears in
    argv or config files.
    """
    state = fold(read_events(store))
    log = EventLog(store)
    lock = threading.Lock()
    app = FastAPI(title="geceval adjudication service")

    def check_auth(request: Request):
        if token is None:
            return
        supplied = request.headers.get("Authorization", "")
        if supplied != f"Bearer {token}":
            raise _HttpError(401, "missing or invalid bearer token")

    @app.exception_handler(_HttpError)
    async def _handle(request: Request, exc: _HttpError):
        body = {"error": exc.message}
        if exc.code:
            body["code"] = exc.code
        return JSONResponse(status_code=exc.status, content=body)

    def require_annotator(annotator_id: str):
        if annotator_id not in annotators:
            raise _HttpError(403, f"unknown annotator {annotator_id!r}")

    @app.get("/api/queue/next", dependencies=[Depends(check_auth)])
    def next_case(annotator_id: str):
        require_annotator(annotator_id)
        with lock:
            eligible = [
                c for c in state.values()
                if (c.status is CaseStatus.PENDING_HUMAN
                    and annotator_id not in c.human_verdicts)
                or c.status is CaseStatus.PENDING_DISCUSSION
            ]
        if not eligible:
            return Response(status_code=204)
        return blinded_payload(min(eligible, key=lambda c: c.id))

    @app.post("/api/cases/{case_id}/judgment", dependencies=[Depends(check_auth)])
    def post_judgment(case_id: str, body: JudgmentBody):
        require_annotator(body.annotator_id)
        with lock:
            case = state.get(case_id)
            if case is None:
                raise _HttpError(404, f"no case {case_id}", code="unknown_case")
            try:
                verdict = verdict_from_option(body.verdict, case.panel_order)
                updated = apply_human_verdict(case, body.annotator_id, verdict)
            except AdjudicationError as exc:
                raise _HttpError(_ERROR_STATUS[exc.code], str(exc), code=exc.code)
            log.append(EventKind.HUMAN_VERDICT,
                       human_verdict_payload(case_id, body.annotator_id, verdict))
            state[case_id] = updated
        return {"case_id": case_id, "status": updated.status.value}

    @app.post("/api/cases/{case_id}/resolution", dependencies=[Depends(check_auth)])
    def post_resolution(case_id: str, body: ResolutionBody):
        with lock:
            case = state.get(case_id)
            if case is None:
                raise _HttpError(404, f"no case {case_id}", code="unknown_case")
            try:
                verdict = verdict_from_option(body.verdict, case.panel_order)
                updated = apply_resolution(case, verdict)
            except AdjudicationError as exc:
                raise _HttpError(_ERROR_STATUS[exc.code], str(exc), code=exc.code)
            log.append(EventKind.RESOLUTION,
                       resolution_payload(case_id, verdict))
            state[case_id] = updated
        return {"case_id": case_id, "status": updated.status.value}

    @app.get("/api/stats", dependencies=[Depends(check_auth)])
    def stats():
        with lock:
            snapshot = list(state.values())
        return compute_stats(snapshot)

    @app.get("/api/cases", dependencies=[Depends(check_auth)])
    def list_cases(status: str | None = None):
        wanted = None
        if status is not None:
            try:
                wanted = CaseStatus(status)
            except ValueError:
                raise _HttpError(400, f"unknown status {status!r}")
        with lock:
            snapshot = list(state.values())
        cases = [c for c in snapshot if wanted is None or c.status is wanted]
        return {"cases": [blinded_payload(c)
                          for c in sorted(cases, key=lambda c: c.id)]}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
