"""Per-type profiles: rates, serialization, and cross-system correlation."""

import random

import pytest

from geceval.analysis import (
    LOW_SUPPORT_THRESHOLD,
    ProfileRow,
    TypeProfile,
    correlate_profiles,
    profile_system,
    read_profile_tsv,
    write_profile_tsv,
)
from geceval.corpus import AnnotatedSentence, Corpus, Edit, ErrorTag, Sentence
from geceval.errors import ContractViolation, InsufficientData

from oracles import brute_force_spearman


def edit(start, end, replacement, tag, annotator=0):
    return Edit(start=start, end=end, replacement=replacement,
                tag=ErrorTag.parse(tag), annotator=annotator)


def det_corpus():
    """Ten sentences, each with one gold M:DET insertion before "cat"."""
    sentences = []
    for i in range(10):
        src = Sentence.from_text(f"yesterday cat number {i} slept")
        gold = (edit(1, 1, "the", "M:DET"),)
        sentences.append(AnnotatedSentence(source=src,
                                           edits_by_annotator={0: gold}))
    return Corpus(tuple(sentences))


def rate_profile(values):
    rows = {
        tag: ProfileRow(tag=tag, correction_rate=rate, false_insertion_rate=None,
                        gold_count=10, sys_count=0)
        for tag, rate in values.items()
    }
    return TypeProfile(rows=rows)


class TestProfileSystem:
    def test_perfect_system(self, dev20_corpus):
        hyp = [sent.edits_by_annotator.get(0, ()) for sent in dev20_corpus]
        profile = profile_system(hyp, dev20_corpus)
        assert profile.rows
        for row in profile.rows.values():
            if row.gold_count:
                assert row.correction_rate == 100.0
            if row.sys_count:
                assert row.false_insertion_rate == 0.0

    def test_empty_hypothesis(self, dev20_corpus):
        profile = profile_system([[] for _ in dev20_corpus], dev20_corpus)
        for row in profile.rows.values():
            assert row.correction_rate == 0.0
            assert row.sys_count == 0
            assert row.false_insertion_rate is None

    def test_hand_counted_rates(self):
        corpus = det_corpus()
        hyp = []
        for i, sent in enumerate(corpus):
            edits = list(sent.edits_by_annotator[0]) if i < 8 else []
            if i in (0, 1):  # two spurious same-tag insertions elsewhere
                edits.append(edit(4, 4, "a", "M:DET"))
            hyp.append(edits)
        profile = profile_system(hyp, corpus)
        row = profile.rows["M:DET"]
        assert row.correction_rate == pytest.approx(80.0)
        assert row.false_insertion_rate == pytest.approx(20.0)
        assert row.gold_count == 10
        assert row.sys_count == 10

    def test_false_insertion_row_uses_hypothesis_tag(self):
        corpus = det_corpus()
        hyp = [[edit(2, 3, "слово", "R:SPELL")] if i == 0 else []
               for i in range(10)]
        profile = profile_system(hyp, corpus)
        assert profile.rows["R:SPELL"].false_insertion_rate == 100.0
        assert profile.rows["R:SPELL"].gold_count == 0
        assert profile.rows["R:SPELL"].correction_rate is None
        assert profile.rows["M:DET"].correction_rate == 0.0

    def test_invariant_under_sentence_permutation(self, dev20_corpus):
        hyp = [list(sent.edits_by_annotator.get(0, ()))[:1] for sent in dev20_corpus]
        base = profile_system(hyp, dev20_corpus)
        order = list(range(len(dev20_corpus)))
        random.Random(3).shuffle(order)
        shuffled = profile_system([hyp[i] for i in order],
                                  Corpus(tuple(dev20_corpus[i] for i in order)))
        assert shuffled == base

    def test_matched_never_exceeds_gold(self, dev20_corpus):
        hyp = [list(sent.edits_by_annotator.get(0, ())) for sent in dev20_corpus]
        profile = profile_system(hyp, dev20_corpus)
        for row in profile.rows.values():
            assert row.correction_rate is None or row.correction_rate <= 100.0

    def test_fixed_annotator_changes_selection(self, dev20_corpus):
        hyp = [list(sent.edits_by_annotator.get(0, ())) for sent in dev20_corpus]
        best = profile_system(hyp, dev20_corpus)
        # scored against annotator 1 only, the same edits no longer all match
        fixed = profile_system(
            [h if 1 in s.edits_by_annotator else []
             for h, s in zip(hyp, dev20_corpus)],
            Corpus(tuple(s for s in dev20_corpus if 1 in s.edits_by_annotator)),
            annotator=1,
        )
        assert fixed != best

    def test_length_mismatch(self, dev20_corpus):
        with pytest.raises(ContractViolation):
            profile_system([[]], dev20_corpus)

    def test_low_support_flag(self):
        row = ProfileRow("M:DET", 50.0, None, LOW_SUPPORT_THRESHOLD - 1, 0)
        assert row.low_support
        assert not ProfileRow("M:DET", 50.0, None, LOW_SUPPORT_THRESHOLD, 0).low_support


class TestCorrelateProfiles:
    def test_identical_profiles(self):
        profile = rate_profile({"M:DET": 82.0, "R:PREP": 72.2, "U:PUNCT": 44.1,
                                "R:SPELL": 96.0})
        res = correlate_profiles(profile, profile)
        assert res.rho == pytest.approx(1.0)
        assert res.n == 4

    def test_reversed_ranking(self):
        a = rate_profile({"A": 10.0, "B": 20.0, "C": 30.0, "D": 40.0})
        b = rate_profile({"A": 40.0, "B": 30.0, "C": 20.0, "D": 10.0})
        assert correlate_profiles(a, b).rho == pytest.approx(-1.0)

    def test_published_rate_pairs_match_oracle(self, table2_rates):
        tags = sorted(table2_rates)
        gpt = rate_profile({t: table2_rates[t][0] for t in tags})
        llama = rate_profile({t: table2_rates[t][1] for t in tags})
        res = correlate_profiles(gpt, llama)
        xs = [table2_rates[t][0] for t in tags]
        ys = [table2_rates[t][1] for t in tags]
        assert res.n == 19
        assert res.rho == pytest.approx(brute_force_spearman(xs, ys), abs=1e-9)
        assert res.p_value < 0.0001

    def test_symmetric(self, table2_rates):
        gpt = rate_profile({t: v[0] for t, v in table2_rates.items()})
        llama = rate_profile({t: v[1] for t, v in table2_rates.items()})
        assert correlate_profiles(gpt, llama).rho == pytest.approx(
            correlate_profiles(llama, gpt).rho, abs=1e-12)

    def test_too_few_common_rows(self):
        a = rate_profile({"A": 1.0, "B": 2.0})
        b = rate_profile({"A": 2.0, "B": 1.0, "C": 3.0})
        with pytest.raises(InsufficientData):
            correlate_profiles(a, b)

    def test_rows_missing_field_do_not_count(self):
        rows_a = {t: ProfileRow(t, None, 50.0, 0, 4) for t in "ABCD"}
        rows_b = {t: ProfileRow(t, float(i), None, 3, 0)
                  for i, t in enumerate("ABCD")}
        with pytest.raises(InsufficientData):
            correlate_profiles(TypeProfile(rows_a), TypeProfile(rows_b))

    def test_false_insertion_field(self):
        def fir_profile(values):
            rows = {t: ProfileRow(t, None, v, 0, 10) for t, v in values.items()}
            return TypeProfile(rows=rows)

        a = fir_profile({"A": 10.0, "B": 20.0, "C": 30.0})
        b = fir_profile({"A": 15.0, "B": 25.0, "C": 35.0})
        assert correlate_profiles(a, b, field="false_insertion").rho == \
            pytest.approx(1.0)

    def test_unknown_field(self):
        profile = rate_profile({"A": 1.0, "B": 2.0, "C": 3.0})
        with pytest.raises(ContractViolation):
            correlate_profiles(profile, profile, field="recall")


class TestProfileTsv:
    def test_round_trip(self, dev20_corpus):
        hyp = [list(sent.edits_by_annotator.get(0, ()))[:2] for sent in dev20_corpus]
        profile = profile_system(hyp, dev20_corpus)
        assert read_profile_tsv(write_profile_tsv(profile)) == profile

    def test_absent_rates_round_trip(self):
        rows = {"M:DET": ProfileRow("M:DET", None, 25.0, 0, 4),
                "R:VERB": ProfileRow("R:VERB", 66.0 + 2 / 3, None, 3, 0)}
        profile = TypeProfile(rows=rows)
        assert read_profile_tsv(write_profile_tsv(profile)) == profile

    def test_bad_header_rejected(self):
        with pytest.raises(ContractViolation):
            read_profile_tsv("tag\tcorrection_rate\n")

    def test_bad_row_rejected(self):
        text = write_profile_tsv(rate_profile({"A": 1.0})) + "B\t2.0\n"
        with pytest.raises(ContractViolation):
            read_profile_tsv(text)
