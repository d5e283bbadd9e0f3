"""Adjudication HTTP service: auth, queue, verdicts, stats, recovery."""

from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from geceval.clients import ConstantJudge
from geceval.corpus import Sentence
from geceval.judge import CaseStatus, PanelOrder, build_cases, run_llm_stage
from geceval.events import record_run
from geceval.service import create_app

ANNOTATORS = {"ann1": "First Annotator", "ann2": "Second Annotator"}
TOKEN = "test-secret"
AUTH = {"Authorization": f"Bearer {TOKEN}"}

BLINDED_FIELDS = {"case_id", "source", "option_a", "option_b", "status"}


def staged_store(tmp_path, n=4, agree=False):
    """A store with n escalated (or consensus, if agree) cases."""
    src = [Sentence.from_text(f"sentence {i} has mistake") for i in range(n)]
    ref = [Sentence.from_text(f"sentence {i} has a mistake") for i in range(n)]
    out = [Sentence.from_text(f"sentence {i} has mistakes") for i in range(n)]
    cases = build_cases(src, ref, out)
    judge_b = ConstantJudge("A") if agree else ConstantJudge("B")
    staged = run_llm_stage(cases, ConstantJudge("A"), judge_b)
    store = tmp_path / "events.jsonl"
    record_run(store, staged)
    return store, staged


@pytest.fixture()
def service(tmp_path):
    store, staged = staged_store(tmp_path)
    app = create_app(store, ANNOTATORS, token=TOKEN)
    with TestClient(app, headers=AUTH) as client:
        yield client, staged, store


class TestAuth:
    def test_missing_token_rejected(self, service):
        client, _, _ = service
        response = client.get("/api/stats", headers={"Authorization": ""})
        assert response.status_code == 401

    def test_wrong_token_rejected(self, service):
        client, _, _ = service
        response = client.get("/api/stats",
                              headers={"Authorization": "Bearer nope"})
        assert response.status_code == 401

    def test_valid_token_accepted(self, service):
        client, _, _ = service
        assert client.get("/api/stats").status_code == 200

    def test_no_token_configured_means_open(self, tmp_path):
        store, _ = staged_store(tmp_path, n=1)
        with TestClient(create_app(store, ANNOTATORS)) as client:
            assert client.get("/api/stats").status_code == 200


class TestQueue:
    def test_unknown_annotator_forbidden(self, service):
        client, _, _ = service
        response = client.get("/api/queue/next",
                              params={"annotator_id": "intruder"})
        assert response.status_code == 403

    def test_serves_lowest_id_pending_case(self, service):
        client, staged, _ = service
        response = client.get("/api/queue/next", params={"annotator_id": "ann1"})
        assert response.status_code == 200
        assert response.json()["case_id"] == min(c.id for c in staged)

    def test_payload_is_exactly_the_blinded_contract(self, service):
        client, staged, _ = service
        payload = client.get("/api/queue/next",
                             params={"annotator_id": "ann1"}).json()
        assert set(payload) == BLINDED_FIELDS
        case = next(c for c in staged if c.id == payload["case_id"])
        expect_a, expect_b = case.blinded_options()
        assert payload["option_a"] == expect_a
        assert payload["option_b"] == expect_b
        assert payload["status"] == "PendingHuman"

    def test_exhausted_queue_gives_204(self, service):
        client, staged, _ = service
        for case in staged:
            for ann in ("ann1", "ann2"):
                client.post(f"/api/cases/{case.id}/judgment",
                            json={"annotator_id": ann, "verdict": "TIE"})
        response = client.get("/api/queue/next", params={"annotator_id": "ann1"})
        assert response.status_code == 204

    def test_already_judged_cases_skipped_per_annotator(self, service):
        client, staged, _ = service
        first = min(c.id for c in staged)
        client.post(f"/api/cases/{first}/judgment",
                    json={"annotator_id": "ann1", "verdict": "TIE"})
        next_for_ann1 = client.get("/api/queue/next",
                                   params={"annotator_id": "ann1"}).json()
        next_for_ann2 = client.get("/api/queue/next",
                                   params={"annotator_id": "ann2"}).json()
        assert next_for_ann1["case_id"] != first
        assert next_for_ann2["case_id"] == first

    def test_discussion_cases_enter_the_queue(self, service):
        client, staged, _ = service
        case = staged[0]
        client.post(f"/api/cases/{case.id}/judgment",
                    json={"annotator_id": "ann1", "verdict": "OPTION_A"})
        client.post(f"/api/cases/{case.id}/judgment",
                    json={"annotator_id": "ann2", "verdict": "OPTION_B"})
        listed = client.get("/api/cases",
                            params={"status": "PendingDiscussion"}).json()
        assert [c["case_id"] for c in listed["cases"]] == [case.id]
        # both annotators still see it queued, now for resolution
        queued = client.get("/api/queue/next",
                            params={"annotator_id": "ann1"}).json()
        assert queued["status"] in ("PendingHuman", "PendingDiscussion")


class TestJudgment:
    def test_first_and_second_verdicts(self, service):
        client, staged, _ = service
        case = staged[0]
        first = client.post(f"/api/cases/{case.id}/judgment",
                            json={"annotator_id": "ann1", "verdict": "TIE"})
        assert first.status_code == 200
        assert first.json() == {"case_id": case.id, "status": "PendingHuman"}
        second = client.post(f"/api/cases/{case.id}/judgment",
                             json={"annotator_id": "ann2", "verdict": "TIE"})
        assert second.json()["status"] == "Resolved"

    def test_option_tokens_map_through_panel_order(self, service):
        client, staged, _ = service
        for case in staged:
            for ann in ("ann1", "ann2"):
                client.post(f"/api/cases/{case.id}/judgment",
                            json={"annotator_id": ann, "verdict": "OPTION_A"})
        stats = client.get("/api/stats").json()
        gold_first = sum(c.panel_order is PanelOrder.GOLD_FIRST for c in staged)
        expected = 100 * gold_first / len(staged)
        assert stats["final_distribution"]["GoldPreferred"] == pytest.approx(expected)

    def test_duplicate_annotator_conflict(self, service):
        client, staged, _ = service
        case = staged[0]
        client.post(f"/api/cases/{case.id}/judgment",
                    json={"annotator_id": "ann1", "verdict": "TIE"})
        again = client.post(f"/api/cases/{case.id}/judgment",
                            json={"annotator_id": "ann1", "verdict": "TIE"})
        assert again.status_code == 409
        assert again.json()["code"] == "duplicate_annotator"

    def test_verdict_on_resolved_case_conflict(self, service):
        client, staged, _ = service
        case = staged[0]
        for ann in ("ann1", "ann2"):
            client.post(f"/api/cases/{case.id}/judgment",
                        json={"annotator_id": ann, "verdict": "TIE"})
        late = client.post(f"/api/cases/{case.id}/judgment",
                           json={"annotator_id": "ann1", "verdict": "TIE"})
        assert late.status_code == 409

    def test_unknown_case_404(self, service):
        client, _, _ = service
        response = client.post("/api/cases/feedbeef/judgment",
                               json={"annotator_id": "ann1", "verdict": "TIE"})
        assert response.status_code == 404

    def test_bad_verdict_token_400(self, service):
        client, staged, _ = service
        response = client.post(f"/api/cases/{staged[0].id}/judgment",
                               json={"annotator_id": "ann1", "verdict": "A"})
        assert response.status_code == 400

    def test_unknown_annotator_403(self, service):
        client, staged, _ = service
        response = client.post(f"/api/cases/{staged[0].id}/judgment",
                               json={"annotator_id": "ann9", "verdict": "TIE"})
        assert response.status_code == 403

    def test_concurrent_duplicate_posts_one_wins(self, service):
        client, staged, _ = service
        case = staged[0]

        def fire(_):
            return client.post(f"/api/cases/{case.id}/judgment",
                               json={"annotator_id": "ann1", "verdict": "TIE"})

        with ThreadPoolExecutor(max_workers=2) as pool:
            codes = sorted(r.status_code for r in pool.map(fire, range(2)))
        assert codes == [200, 409]


class TestResolution:
    def disputed_case(self, client, staged):
        case = staged[0]
        client.post(f"/api/cases/{case.id}/judgment",
                    json={"annotator_id": "ann1", "verdict": "OPTION_A"})
        client.post(f"/api/cases/{case.id}/judgment",
                    json={"annotator_id": "ann2", "verdict": "OPTION_B"})
        return case

    def test_resolution_closes_discussion(self, service):
        client, staged, _ = service
        case = self.disputed_case(client, staged)
        response = client.post(f"/api/cases/{case.id}/resolution",
                               json={"verdict": "TIE"})
        assert response.status_code == 200
        assert response.json()["status"] == "Resolved"

    def test_resolution_wrong_state_409(self, service):
        client, staged, _ = service
        response = client.post(f"/api/cases/{staged[0].id}/resolution",
                               json={"verdict": "TIE"})
        assert response.status_code == 409

    def test_repeat_resolution_409(self, service):
        client, staged, _ = service
        case = self.disputed_case(client, staged)
        client.post(f"/api/cases/{case.id}/resolution", json={"verdict": "TIE"})
        repeat = client.post(f"/api/cases/{case.id}/resolution",
                             json={"verdict": "TIE"})
        assert repeat.status_code == 409


class TestStats:
    def test_empty_store_zeros(self, tmp_path):
        app = create_app(tmp_path / "empty.jsonl", ANNOTATORS, token=TOKEN)
        with TestClient(app, headers=AUTH) as client:
            stats = client.get("/api/stats").json()
        assert stats["total_cases"] == 0
        assert stats["consensus_rate"] == 0.0
        assert stats["escalation_progress"] == 0.0
        assert stats["valid_or_preferred"] == 0.0

    def test_mid_run_progress_strictly_between_zero_and_one(self, service):
        client, staged, _ = service
        case = staged[0]
        for ann in ("ann1", "ann2"):
            client.post(f"/api/cases/{case.id}/judgment",
                        json={"annotator_id": ann, "verdict": "TIE"})
        stats = client.get("/api/stats").json()
        assert 0.0 < stats["escalation_progress"] < 1.0
        assert stats["status_counts"]["Resolved"] == 1
        assert stats["status_counts"]["PendingHuman"] == len(staged) - 1

    def test_consensus_rate_fixed_by_llm_stage(self, tmp_path):
        store, staged = staged_store(tmp_path, n=3, agree=True)
        app = create_app(store, ANNOTATORS, token=TOKEN)
        with TestClient(app, headers=AUTH) as client:
            stats = client.get("/api/stats").json()
        assert stats["consensus_rate"] == 1.0
        assert stats["workload_reduction"] == 1.0
        assert stats["finished"] == 3

    def test_distribution_consistency(self, service):
        client, staged, _ = service
        for case in staged:
            for ann in ("ann1", "ann2"):
                client.post(f"/api/cases/{case.id}/judgment",
                            json={"annotator_id": ann, "verdict": "TIE"})
        stats = client.get("/api/stats").json()
        dist = stats["final_distribution"]
        assert sum(dist.values()) == pytest.approx(100.0)
        assert stats["valid_or_preferred"] == pytest.approx(
            dist["ModelPreferred"] + dist["EquallyValid"])
        assert stats["human_kappa"]["observed_agreement"] == 1.0


class TestCaseListing:
    def test_filter_by_status(self, service):
        client, staged, _ = service
        listed = client.get("/api/cases",
                            params={"status": "PendingHuman"}).json()
        assert len(listed["cases"]) == len(staged)
        assert [c["case_id"] for c in listed["cases"]] == \
            sorted(c.id for c in staged)

    def test_unknown_status_400(self, service):
        client, _, _ = service
        assert client.get("/api/cases",
                          params={"status": "Nope"}).status_code == 400

    def test_all_payloads_blinded(self, service):
        client, _, _ = service
        listed = client.get("/api/cases").json()
        for payload in listed["cases"]:
            assert set(payload) == BLINDED_FIELDS
            assert "gold" not in payload["status"].lower()


class TestCrashRecovery:
    def test_refold_reproduces_identical_responses(self, service):
        client, staged, store = service
        case = staged[0]
        client.post(f"/api/cases/{case.id}/judgment",
                    json={"annotator_id": "ann1", "verdict": "OPTION_A"})
        client.post(f"/api/cases/{case.id}/judgment",
                    json={"annotator_id": "ann2", "verdict": "OPTION_B"})
        client.post(f"/api/cases/{case.id}/resolution", json={"verdict": "TIE"})
        before_stats = client.get("/api/stats").content
        before_cases = client.get("/api/cases").content

        reopened = create_app(store, ANNOTATORS, token=TOKEN)
        with TestClient(reopened, headers=AUTH) as fresh:
            assert fresh.get("/api/stats").content == before_stats
            assert fresh.get("/api/cases").content == before_cases
