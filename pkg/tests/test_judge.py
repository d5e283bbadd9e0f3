"""Judge pipeline: case construction, blinded verdicts, escalation, summary."""

import pytest

from geceval.clients import ConstantJudge, MappingJudge, ScriptedJudge
from geceval.corpus import Sentence
from geceval.errors import (
    AdjudicationError,
    ConfigurationError,
    ContractViolation,
    IncompleteCasesError,
    InsufficientData,
)
from geceval.judge import (
    CaseStatus,
    JudgmentVerdict,
    PanelOrder,
    apply_human_verdict,
    apply_resolution,
    build_cases,
    parse_verdict,
    prompt_template,
    record_human_verdict,
    record_resolution,
    render_prompt,
    run_llm_stage,
    summarize,
)

GOLD = JudgmentVerdict.GOLD_PREFERRED
MODEL = JudgmentVerdict.MODEL_PREFERRED
TIE = JudgmentVerdict.EQUALLY_VALID


def sentences(*texts):
    return [Sentence.from_text(t) for t in texts]


def divergent_cases(n, seed=42):
    src = sentences(*(f"source sentence {i}" for i in range(n)))
    gold = sentences(*(f"gold correction {i}" for i in range(n)))
    hyp = sentences(*(f"model correction {i}" for i in range(n)))
    return build_cases(src, gold, hyp, seed=seed)


def answer_for(case, verdict):
    """The blinded A/B/TIE token a judge must emit to express ``verdict``."""
    if verdict is TIE:
        return "TIE"
    gold_is_a = case.panel_order is PanelOrder.GOLD_FIRST
    return "A" if (verdict is GOLD) == gold_is_a else "B"


class TestBuildCases:
    def test_no_divergence_no_cases(self):
        gold = sentences("a fine sentence", "another one")
        assert build_cases(gold, gold, gold) == []

    def test_one_divergent_sentence(self):
        src = sentences("he go home", "she is here")
        gold = sentences("he goes home", "she is here")
        hyp = sentences("he went home", "she is here")
        cases = build_cases(src, gold, hyp)
        assert len(cases) == 1
        case = cases[0]
        assert case.status is CaseStatus.PENDING_LLM
        assert case.source.text == "he go home"
        assert build_cases(src, gold, hyp)[0].id == case.id

    def test_id_ignores_corpus_position(self):
        src = sentences("x y", "he go home")
        gold = sentences("x y", "he goes home")
        hyp = sentences("x y", "he went home")
        shifted = build_cases(src, gold, hyp)[0]
        direct = build_cases(src[1:], gold[1:], hyp[1:])[0]
        assert shifted.id == direct.id
        assert shifted.panel_order == direct.panel_order

    def test_duplicate_triples_collapse(self):
        src = sentences("he go", "he go")
        gold = sentences("he goes", "he goes")
        hyp = sentences("he went", "he went")
        assert len(build_cases(src, gold, hyp)) == 1

    def test_length_mismatch(self):
        with pytest.raises(ContractViolation):
            build_cases(sentences("a"), sentences("a", "b"), sentences("a"))

    def test_seed_changes_some_panel_orders(self):
        a = divergent_cases(64, seed=1)
        b = divergent_cases(64, seed=2)
        assert [c.id for c in a] == [c.id for c in b]
        assert any(x.panel_order != y.panel_order for x, y in zip(a, b))

    def test_both_panel_orders_occur(self):
        orders = {c.panel_order for c in divergent_cases(64)}
        assert orders == {PanelOrder.GOLD_FIRST, PanelOrder.MODEL_FIRST}


class TestPrompt:
    def test_template_has_placeholders(self):
        template = prompt_template()
        for placeholder in ("{source}", "{option_a}", "{option_b}"):
            assert placeholder in template

    def test_render_respects_panel_order(self):
        case = divergent_cases(8)[0]
        prompt = render_prompt(case)
        option_a, option_b = case.blinded_options()
        assert case.source.text in prompt
        assert prompt.index(option_a) < prompt.index(f"Option B: {option_b}")
        assert "gold" not in prompt.split("Option A")[0].lower()


class TestParseVerdict:
    @pytest.mark.parametrize("text,expected", [
        ("A", GOLD),
        ("b", MODEL),
        ("TIE", TIE),
        ("tie.", TIE),
        ('"A"', GOLD),
        ("**B**", MODEL),
        ("A \nbecause it is cleaner", GOLD),
        ("  B  ", MODEL),
    ])
    def test_accepted_tokens_gold_first(self, text, expected):
        assert parse_verdict(text, PanelOrder.GOLD_FIRST) == expected

    def test_mapping_flips_with_panel_order(self):
        assert parse_verdict("A", PanelOrder.MODEL_FIRST) == MODEL
        assert parse_verdict("B", PanelOrder.MODEL_FIRST) == GOLD

    @pytest.mark.parametrize("text", [
        "", "   ", "Answer: A", "The better correction is B", "AB", "A/B",
        "both", "C",
    ])
    def test_rejected_completions(self, text):
        assert parse_verdict(text, PanelOrder.GOLD_FIRST) is None


class TestRunLlmStage:
    def test_constant_tie_judges_force_consensus(self):
        cases = divergent_cases(10)
        done = run_llm_stage(cases, ConstantJudge("TIE"), ConstantJudge("TIE"))
        assert all(c.status is CaseStatus.CONSENSUS_FINAL for c in done)
        assert all(c.final is TIE for c in done)

    def test_disagreeing_judges_escalate_everything(self):
        cases = divergent_cases(10)
        done = run_llm_stage(cases, ConstantJudge("A"), ConstantJudge("B"))
        assert all(c.status is CaseStatus.PENDING_HUMAN for c in done)
        assert all(len(c.llm_verdicts) == 2 for c in done)
        assert all(c.final is None for c in done)

    def test_verdict_mapping_through_panel_order(self):
        cases = divergent_cases(16)
        judge = MappingJudge({c.source.text: answer_for(c, MODEL) for c in cases})
        done = run_llm_stage(cases, judge, judge)
        assert all(c.final is MODEL for c in done)

    def test_unparseable_after_retries_escalates(self):
        case = divergent_cases(1)[0]
        done = run_llm_stage([case], ConstantJudge("no idea"),
                             ConstantJudge("TIE"), retries=2)[0]
        assert done.status is CaseStatus.PENDING_HUMAN
        assert "unparseable" in done.error

    def test_retry_recovers_flaky_completion(self):
        case = divergent_cases(1)[0]
        flaky = ScriptedJudge(["garbage", "TIE"])
        done = run_llm_stage([case], flaky, ConstantJudge("TIE"), retries=1)[0]
        assert done.status is CaseStatus.CONSENSUS_FINAL

    def test_transport_failure_never_drops_case(self):
        class Exploding:
            def complete(self, prompt):
                raise OSError("connection refused")

        case = divergent_cases(1)[0]
        done = run_llm_stage([case], Exploding(), ConstantJudge("TIE"))[0]
        assert done.status is CaseStatus.PENDING_HUMAN
        assert "transport failure" in done.error

    def test_raw_completions_kept_for_audit(self):
        case = divergent_cases(1)[0]
        done = run_llm_stage([case], ConstantJudge("TIE"), ConstantJudge("TIE"))[0]
        assert done.llm_raw == {"judge_a": "TIE", "judge_b": "TIE"}

    def test_requires_pending_llm(self):
        done = run_llm_stage(divergent_cases(1), ConstantJudge("TIE"),
                             ConstantJudge("TIE"))
        with pytest.raises(ContractViolation):
            run_llm_stage(done, ConstantJudge("TIE"), ConstantJudge("TIE"))

    def test_concurrent_stage_matches_sequential(self):
        cases = divergent_cases(20)
        judge = MappingJudge({c.source.text: answer_for(c, GOLD) for c in cases})
        sequential = run_llm_stage(cases, judge, judge)
        concurrent = run_llm_stage(cases, judge, judge, max_inflight=4)
        assert sequential == concurrent

    def test_script_exhaustion_is_a_config_error(self):
        judge = ScriptedJudge(["TIE"])
        judge.complete("x")
        with pytest.raises(ConfigurationError):
            judge.complete("x")


def escalated_case():
    case = divergent_cases(1)[0]
    return run_llm_stage([case], ConstantJudge("A"), ConstantJudge("B"))[0]


class TestHumanStage:
    def test_first_verdict_keeps_pending(self):
        case = apply_human_verdict(escalated_case(), "ann1", GOLD)
        assert case.status is CaseStatus.PENDING_HUMAN
        assert case.final is None

    def test_agreeing_pair_resolves(self):
        case = apply_human_verdict(escalated_case(), "ann1", TIE)
        case = apply_human_verdict(case, "ann2", TIE)
        assert case.status is CaseStatus.RESOLVED
        assert case.final is TIE

    def test_differing_pair_goes_to_discussion(self):
        case = apply_human_verdict(escalated_case(), "ann1", GOLD)
        case = apply_human_verdict(case, "ann2", MODEL)
        assert case.status is CaseStatus.PENDING_DISCUSSION
        assert case.final is None

    def test_duplicate_annotator_rejected(self):
        case = apply_human_verdict(escalated_case(), "ann1", GOLD)
        with pytest.raises(AdjudicationError) as err:
            apply_human_verdict(case, "ann1", MODEL)
        assert err.value.code == "duplicate_annotator"

    def test_third_annotator_rejected(self):
        case = apply_human_verdict(escalated_case(), "ann1", GOLD)
        case = apply_human_verdict(case, "ann2", MODEL)
        with pytest.raises(AdjudicationError) as err:
            apply_human_verdict(case, "ann3", TIE)
        assert err.value.code == "two_annotator_protocol"

    def test_wrong_state_rejected(self):
        consensus = run_llm_stage(divergent_cases(1), ConstantJudge("TIE"),
                                  ConstantJudge("TIE"))[0]
        with pytest.raises(AdjudicationError) as err:
            apply_human_verdict(consensus, "ann1", GOLD)
        assert err.value.code == "wrong_state"

    def test_bad_verdict_rejected(self):
        with pytest.raises(AdjudicationError) as err:
            apply_human_verdict(escalated_case(), "ann1", "OPTION_A")
        assert err.value.code == "bad_verdict"

    def test_registry_wrappers(self):
        case = escalated_case()
        cases = {case.id: case}
        record_human_verdict(cases, case.id, "ann1", GOLD)
        updated = record_human_verdict(cases, case.id, "ann2", GOLD)
        assert updated.status is CaseStatus.RESOLVED
        assert cases[case.id] is updated
        with pytest.raises(AdjudicationError) as err:
            record_human_verdict(cases, "missing", "ann1", GOLD)
        assert err.value.code == "unknown_case"


class TestResolution:
    def disputed(self):
        case = apply_human_verdict(escalated_case(), "ann1", GOLD)
        return apply_human_verdict(case, "ann2", MODEL)

    def test_resolution_finalizes(self):
        resolved = apply_resolution(self.disputed(), TIE)
        assert resolved.status is CaseStatus.RESOLVED
        assert resolved.final is TIE

    def test_resolution_keeps_audit_history(self):
        disputed = self.disputed()
        resolved = apply_resolution(disputed, TIE)
        assert resolved.human_verdicts == disputed.human_verdicts

    def test_resolution_requires_discussion_state(self):
        with pytest.raises(AdjudicationError) as err:
            apply_resolution(escalated_case(), TIE)
        assert err.value.code == "wrong_state"

    def test_repeat_resolution_rejected(self):
        resolved = apply_resolution(self.disputed(), TIE)
        with pytest.raises(AdjudicationError) as err:
            apply_resolution(resolved, GOLD)
        assert err.value.code == "wrong_state"

    def test_registry_wrapper_unknown_case(self):
        with pytest.raises(AdjudicationError) as err:
            record_resolution({}, "nope", TIE)
        assert err.value.code == "unknown_case"


class TestSummarize:
    def finished(self, n=10, verdict="TIE"):
        return run_llm_stage(divergent_cases(n), ConstantJudge(verdict),
                             ConstantJudge(verdict))

    def test_all_consensus(self):
        summary = summarize(self.finished())
        assert summary.total_cases == 10
        assert summary.consensus_rate == 1.0
        assert summary.escalation_rate == 0.0
        assert summary.workload_reduction == 1.0
        assert summary.final_distribution[TIE] == 100.0
        assert summary.valid_or_preferred == 100.0
        assert summary.judge_kappa.observed_agreement == 1.0

    def test_unfinished_cases_listed(self):
        cases = divergent_cases(3)
        with pytest.raises(IncompleteCasesError) as err:
            summarize(cases)
        assert sorted(err.value.pending_ids) == sorted(c.id for c in cases)

    def test_empty_case_list(self):
        with pytest.raises(InsufficientData):
            summarize([])

    def test_distribution_sums_to_100(self):
        cases = run_llm_stage(divergent_cases(7), ConstantJudge("A"),
                              ConstantJudge("B"))
        finished = []
        for i, case in enumerate(cases):
            verdict = [GOLD, MODEL, TIE][i % 3]
            case = apply_human_verdict(case, "ann1", verdict)
            finished.append(apply_human_verdict(case, "ann2", verdict))
        summary = summarize(finished)
        assert sum(summary.final_distribution.values()) == pytest.approx(100.0)
        assert summary.valid_or_preferred + \
            summary.final_distribution[GOLD] == pytest.approx(100.0)
        assert summary.consensus_rate == 0.0
        assert summary.human_kappa.kappa == 1.0

    def test_conservation(self):
        cases = run_llm_stage(divergent_cases(9), ConstantJudge("TIE"),
                              ConstantJudge("no"))
        finished = [
            apply_human_verdict(apply_human_verdict(c, "ann1", TIE), "ann2", TIE)
            for c in cases
        ]
        summary = summarize(finished)
        consensus = round(summary.consensus_rate * summary.total_cases)
        escalated = round(summary.escalation_rate * summary.total_cases)
        assert consensus + escalated == summary.total_cases


class TestBlinding:
    def test_always_prefer_a_judge_lands_near_fifty_fifty(self):
        cases = divergent_cases(1000)
        done = run_llm_stage(cases, ConstantJudge("A"), ConstantJudge("A"))
        summary = summarize(done)
        assert summary.consensus_rate == 1.0
        gold_share = summary.final_distribution[GOLD]
        assert 45.0 <= gold_share <= 55.0


# Published outcome mix: consensus verdict counts, escalated final counts,
# and how many of the escalated ties go through explicit discussion.
CONSENSUS_PLAN = [MODEL] * 534 + [TIE] * 237 + [GOLD] * 342
HUMAN_PLAN = [MODEL] * 82 + [GOLD] * 112 + [TIE] * 423
DISCUSSED = 3


@pytest.fixture(scope="module")
def paper_summary():
    cases = divergent_cases(1730)
    script_a, script_b = {}, {}
    for i, case in enumerate(cases):
        if i < len(CONSENSUS_PLAN):
            script_a[case.source.text] = answer_for(case, CONSENSUS_PLAN[i])
            script_b[case.source.text] = script_a[case.source.text]
        else:
            script_a[case.source.text] = answer_for(case, GOLD)
            script_b[case.source.text] = answer_for(case, MODEL)
    staged = run_llm_stage(cases, MappingJudge(script_a), MappingJudge(script_b))

    finished = [c for c in staged if c.status is CaseStatus.CONSENSUS_FINAL]
    pending = [c for c in staged if c.status is CaseStatus.PENDING_HUMAN]
    assert len(pending) == len(HUMAN_PLAN)
    for i, (case, verdict) in enumerate(zip(pending, HUMAN_PLAN)):
        if verdict is TIE and i >= len(HUMAN_PLAN) - DISCUSSED:
            case = apply_human_verdict(case, "ann1", GOLD)
            case = apply_human_verdict(case, "ann2", MODEL)
            case = apply_resolution(case, TIE)
        else:
            case = apply_human_verdict(case, "ann1", verdict)
            case = apply_human_verdict(case, "ann2", verdict)
        finished.append(case)
    return summarize(finished)


class TestPaperReplay:
    """Scripted judges and annotators reproducing the published outcome mix."""

    def test_total_cases(self, paper_summary):
        assert paper_summary.total_cases == 1730

    def test_consensus_rate(self, paper_summary):
        assert paper_summary.consensus_rate * 100 == pytest.approx(64.34, abs=0.01)
        assert paper_summary.workload_reduction == paper_summary.consensus_rate

    def test_final_distribution(self, paper_summary):
        dist = paper_summary.final_distribution
        assert dist[MODEL] == pytest.approx(35.61, abs=0.01)
        assert dist[GOLD] == pytest.approx(26.24, abs=0.01)
        assert dist[TIE] == pytest.approx(38.15, abs=0.01)

    def test_valid_or_preferred(self, paper_summary):
        assert paper_summary.valid_or_preferred == pytest.approx(73.76, abs=0.01)

    def test_human_kappa_reported(self, paper_summary):
        assert paper_summary.human_kappa is not None
        assert paper_summary.human_kappa.n == 617
