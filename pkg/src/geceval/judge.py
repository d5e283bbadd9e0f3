"""Hybrid LLM-judge protocol for divergent corrections.

Every sentence where a model's correction differs from the gold correction
becomes a case. Two LLM judges see the pair blinded (which side is gold is
decided by a seeded, per-case coin flip) and answer A/B/TIE; agreement is
final, anything else — disagreement, transport failure, an unparseable
answer after retries — escalates to two human annotators, whose own
disagreements go to discussion. Cases are immutable values; every transition
returns a new case, so a store can replay history and land on identical
state.

Case ids are content hashes of (source, gold, model), making reruns
idempotent, and the blinding coin is derived from (seed, case id), so a
case's panel order never depends on corpus position.
"""

from __future__ import annotations

import hashlib
import string
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from typing import Mapping, MutableMapping, Protocol, Sequence

from .corpus import Sentence
from .errors import (
    AdjudicationError,
    ContractViolation,
    IncompleteCasesError,
    InsufficientData,
)
from .stats import AgreementStats, cohen_kappa

DEFAULT_SEED = 42
PROMPT_VERSION = "1"

JUDGE_A = "judge_a"
JUDGE_B = "judge_b"


class JudgmentVerdict(Enum):
    GOLD_PREFERRED = "GoldPreferred"
    MODEL_PREFERRED = "ModelPreferred"
    EQUALLY_VALID = "EquallyValid"


class CaseStatus(Enum):
    PENDING_LLM = "PendingLLM"
    CONSENSUS_FINAL = "ConsensusFinal"
    PENDING_HUMAN = "PendingHuman"
    PENDING_DISCUSSION = "PendingDiscussion"
    RESOLVED = "Resolved"


class PanelOrder(Enum):
    """Which correction is shown as option A."""

    GOLD_FIRST = "gold_first"
    MODEL_FIRST = "model_first"


TERMINAL_STATUSES = frozenset({CaseStatus.CONSENSUS_FINAL, CaseStatus.RESOLVED})


class JudgeClient(Protocol):
    """Returns a text completion for a rendered prompt."""

    def complete(self, prompt: str) -> str: ...


@dataclass(frozen=True)
class JudgeCase:
    id: str
    source: Sentence
    gold_correction: Sentence
    model_correction: Sentence
    panel_order: PanelOrder
    llm_verdicts: Mapping[str, JudgmentVerdict] = field(default_factory=dict)
    # raw judge completions, kept for audit only — never served to annotators
    llm_raw: Mapping[str, str] = field(default_factory=dict)
    human_verdicts: Mapping[str, JudgmentVerdict] = field(default_factory=dict)
    status: CaseStatus = CaseStatus.PENDING_LLM
    final: JudgmentVerdict | None = None
    error: str | None = None

    def __post_init__(self):
        llm = list(self.llm_verdicts.values())
        if self.status is CaseStatus.PENDING_LLM and llm:
            raise ContractViolation("PendingLLM case already has LLM verdicts")
        if self.status is CaseStatus.CONSENSUS_FINAL:
            if len(llm) != 2 or llm[0] != llm[1] or self.final != llm[0]:
                raise ContractViolation("ConsensusFinal requires two equal LLM "
                                        "verdicts and a matching final")
        if self.status is CaseStatus.PENDING_HUMAN:
            disagreed = len(llm) == 2 and llm[0] != llm[1]
            if not disagreed and self.error is None:
                raise ContractViolation("PendingHuman requires LLM disagreement "
                                        "or a judge error annotation")
        if self.status is CaseStatus.PENDING_DISCUSSION:
            humans = list(self.human_verdicts.values())
            if len(humans) != 2 or humans[0] == humans[1]:
                raise ContractViolation("PendingDiscussion requires exactly two "
                                        "differing human verdicts")
        if self.status is CaseStatus.RESOLVED and self.final is None:
            raise ContractViolation("Resolved case lacks a final verdict")

    def blinded_options(self) -> tuple[str, str]:
        """(option_a, option_b) texts per this case's panel order."""
        if self.panel_order is PanelOrder.GOLD_FIRST:
            return self.gold_correction.text, self.model_correction.text
        return self.model_correction.text, self.gold_correction.text


def _case_id(source: Sentence, gold: Sentence, model: Sentence) -> str:
    blob = "\x1e".join((source.text, gold.text, model.text)).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def _panel_coin(seed: int, case_id: str) -> PanelOrder:
    digest = hashlib.sha256(f"{seed}\x1f{case_id}".encode("utf-8")).digest()
    return PanelOrder.GOLD_FIRST if digest[0] & 1 == 0 else PanelOrder.MODEL_FIRST


def build_cases(
    sources: Sequence[Sentence],
    golds: Sequence[Sentence],
    hyps: Sequence[Sentence],
    *,
    seed: int = DEFAULT_SEED,
) -> list[JudgeCase]:
    """One PendingLLM case per sentence whose model output differs from gold.

    Identical (source, gold, model) triples hash to the same id and are
    emitted once: the repeated judgment would be, by construction, the same.
    """
    if not len(sources) == len(golds) == len(hyps):
        raise ContractViolation(
            f"length mismatch: {len(sources)} sources, {len(golds)} golds, "
            f"{len(hyps)} hypotheses")
    cases: dict[str, JudgeCase] = {}
    for src, gold, hyp in zip(sources, golds, hyps):
        if gold.text == hyp.text:
            continue
        cid = _case_id(src, gold, hyp)
        if cid in cases:
            continue
        cases[cid] = JudgeCase(
            id=cid, source=src, gold_correction=gold, model_correction=hyp,
            panel_order=_panel_coin(seed, cid),
        )
    return list(cases.values())


def prompt_template() -> str:
    path = resources.files("geceval").joinpath("data", "judge_prompt.txt")
    return path.read_text(encoding="utf-8")


def render_prompt(case: JudgeCase, template: str | None = None) -> str:
    option_a, option_b = case.blinded_options()
    tpl = template if template is not None else prompt_template()
    return tpl.format(source=case.source.text, option_a=option_a,
                      option_b=option_b)


_STRIP = string.punctuation + "“”‘’"


def parse_verdict(completion: str, panel_order: PanelOrder) -> JudgmentVerdict | None:
    """Strict A/B/TIE reading of a judge completion; None if it says anything else.

    Only the first non-blank token counts, after stripping surrounding
    punctuation and case. A/B are mapped back through the panel order.
    """
    tokens = completion.split()
    if not tokens:
        return None
    token = tokens[0].strip(_STRIP).upper()
    if token == "TIE":
        return JudgmentVerdict.EQUALLY_VALID
    if token not in ("A", "B"):
        return None
    a_is_gold = panel_order is PanelOrder.GOLD_FIRST
    if (token == "A") == a_is_gold:
        return JudgmentVerdict.GOLD_PREFERRED
    return JudgmentVerdict.MODEL_PREFERRED


OPTION_TOKENS = ("OPTION_A", "OPTION_B", "TIE")


def verdict_from_option(option: str, panel_order: PanelOrder) -> JudgmentVerdict:
    """Map a blinded OPTION_A/OPTION_B/TIE token to an unblinded verdict."""
    if option not in OPTION_TOKENS:
        raise AdjudicationError("bad_verdict",
                                f"verdict must be one of {OPTION_TOKENS}, "
                                f"got {option!r}")
    if option == "TIE":
        return JudgmentVerdict.EQUALLY_VALID
    a_is_gold = panel_order is PanelOrder.GOLD_FIRST
    if (option == "OPTION_A") == a_is_gold:
        return JudgmentVerdict.GOLD_PREFERRED
    return JudgmentVerdict.MODEL_PREFERRED


def _ask_judge(client: JudgeClient, prompt: str, panel_order: PanelOrder,
               retries: int) -> tuple[JudgmentVerdict | None, str | None, str | None]:
    """(verdict, last raw completion, error description) after up to 1+retries calls."""
    raw = None
    failure = "no attempts made"
    for _ in range(1 + retries):
        try:
            raw = client.complete(prompt)
        except Exception as exc:
            failure = f"transport failure: {exc}"
            continue
        verdict = parse_verdict(raw, panel_order)
        if verdict is not None:
            return verdict, raw, None
        failure = f"unparseable completion: {raw!r}"
    return None, raw, failure


def _judge_one(case: JudgeCase, judge_a: JudgeClient, judge_b: JudgeClient,
               template: str, retries: int) -> JudgeCase:
    prompt = render_prompt(case, template)
    verdicts: dict[str, JudgmentVerdict] = {}
    raws: dict[str, str] = {}
    errors = []
    for judge_id, client in ((JUDGE_A, judge_a), (JUDGE_B, judge_b)):
        verdict, raw, failure = _ask_judge(client, prompt, case.panel_order, retries)
        if raw is not None:
            raws[judge_id] = raw
        if verdict is not None:
            verdicts[judge_id] = verdict
        else:
            errors.append(f"{judge_id}: {failure}")
    values = list(verdicts.values())
    if len(values) == 2 and values[0] == values[1]:
        return replace(case, llm_verdicts=verdicts, llm_raw=raws,
                       status=CaseStatus.CONSENSUS_FINAL, final=values[0])
    return replace(case, llm_verdicts=verdicts, llm_raw=raws,
                   status=CaseStatus.PENDING_HUMAN,
                   error="; ".join(errors) or None)


def run_llm_stage(
    cases: Sequence[JudgeCase],
    judge_a: JudgeClient,
    judge_b: JudgeClient,
    *,
    retries: int = 2,
    max_inflight: int = 1,
) -> list[JudgeCase]:
    """Collect both blinded judge verdicts for every pending case.

    Failures never drop a case: whatever cannot be parsed into a consensus
    becomes PendingHuman with the failure recorded on the case.
    """
    for case in cases:
        if case.status is not CaseStatus.PENDING_LLM:
            raise ContractViolation(f"case {case.id} is {case.status.value}, "
                                    "expected PendingLLM")
    if max_inflight < 1:
        raise ContractViolation("max_inflight must be >= 1")
    template = prompt_template()
    if max_inflight == 1:
        return [_judge_one(c, judge_a, judge_b, template, retries) for c in cases]
    with ThreadPoolExecutor(max_workers=max_inflight) as pool:
        return list(pool.map(
            lambda c: _judge_one(c, judge_a, judge_b, template, retries), cases))


def apply_human_verdict(case: JudgeCase, annotator_id: str,
                        verdict: JudgmentVerdict) -> JudgeCase:
    """One annotator's verdict: two equal ones resolve, two differing ones escalate."""
    if not isinstance(verdict, JudgmentVerdict):
        raise AdjudicationError("bad_verdict", f"not a verdict: {verdict!r}")
    if case.status not in (CaseStatus.PENDING_HUMAN, CaseStatus.PENDING_DISCUSSION):
        raise AdjudicationError(
            "wrong_state", f"case {case.id} is {case.status.value}")
    if annotator_id in case.human_verdicts:
        raise AdjudicationError(
            "duplicate_annotator",
            f"annotator {annotator_id} already judged case {case.id}")
    if len(case.human_verdicts) >= 2:
        raise AdjudicationError(
            "two_annotator_protocol",
            f"case {case.id} already has two human verdicts")
    humans = dict(case.human_verdicts)
    humans[annotator_id] = verdict
    if len(humans) == 1:
        return replace(case, human_verdicts=humans)
    first, second = humans.values()
    if first == second:
        return replace(case, human_verdicts=humans,
                       status=CaseStatus.RESOLVED, final=verdict)
    return replace(case, human_verdicts=humans,
                   status=CaseStatus.PENDING_DISCUSSION)


def apply_resolution(case: JudgeCase, verdict: JudgmentVerdict) -> JudgeCase:
    """Close a discussion case; both original human verdicts stay on record."""
    if not isinstance(verdict, JudgmentVerdict):
        raise AdjudicationError("bad_verdict", f"not a verdict: {verdict!r}")
    if case.status is not CaseStatus.PENDING_DISCUSSION:
        raise AdjudicationError(
            "wrong_state",
            f"case {case.id} is {case.status.value}, expected PendingDiscussion")
    return replace(case, status=CaseStatus.RESOLVED, final=verdict)


def record_human_verdict(cases: MutableMapping[str, JudgeCase], case_id: str,
                         annotator_id: str, verdict: JudgmentVerdict) -> JudgeCase:
    if case_id not in cases:
        raise AdjudicationError("unknown_case", f"no case {case_id}")
    updated = apply_human_verdict(cases[case_id], annotator_id, verdict)
    cases[case_id] = updated
    return updated


def record_resolution(cases: MutableMapping[str, JudgeCase], case_id: str,
                      verdict: JudgmentVerdict) -> JudgeCase:
    if case_id not in cases:
        raise AdjudicationError("unknown_case", f"no case {case_id}")
    updated = apply_resolution(cases[case_id], verdict)
    cases[case_id] = updated
    return updated


@dataclass(frozen=True)
class OutcomeSummary:
    total_cases: int
    consensus_rate: float
    escalation_rate: float
    final_distribution: Mapping[JudgmentVerdict, float]  # percentages
    valid_or_preferred: float
    workload_reduction: float
    judge_kappa: AgreementStats | None
    human_kappa: AgreementStats | None


def summarize(cases: Sequence[JudgeCase]) -> OutcomeSummary:
    """Aggregate finished cases into the headline outcome numbers."""
    pending = [c.id for c in cases if c.status not in TERMINAL_STATUSES]
    if pending:
        raise IncompleteCasesError(pending)
    total = len(cases)
    if total == 0:
        raise InsufficientData("no cases to summarize")

    consensus = sum(c.status is CaseStatus.CONSENSUS_FINAL for c in cases)
    counts = {verdict: 0 for verdict in JudgmentVerdict}
    for case in cases:
        assert case.final is not None
        counts[case.final] += 1
    distribution = {v: 100 * n / total for v, n in counts.items()}
    valid_or_preferred = (distribution[JudgmentVerdict.MODEL_PREFERRED]
                          + distribution[JudgmentVerdict.EQUALLY_VALID])

    judge_pairs = [c for c in cases if len(c.llm_verdicts) == 2]
    judge_kappa = None
    if judge_pairs:
        judge_kappa = cohen_kappa(
            [c.llm_verdicts[JUDGE_A].value for c in judge_pairs],
            [c.llm_verdicts[JUDGE_B].value for c in judge_pairs])
    human_pairs = [c for c in cases if len(c.human_verdicts) == 2]
    human_kappa = None
    if human_pairs:
        by_annotator = [sorted(c.human_verdicts.items()) for c in human_pairs]
        human_kappa = cohen_kappa([pair[0][1].value for pair in by_annotator],
                                  [pair[1][1].value for pair in by_annotator])

    rate = consensus / total
    return OutcomeSummary(
        total_cases=total,
        consensus_rate=rate,
        escalation_rate=1 - rate,
        final_distribution=distribution,
        valid_or_preferred=valid_or_preferred,
        workload_reduction=rate,
        judge_kappa=judge_kappa,
        human_kappa=human_kappa,
    )
