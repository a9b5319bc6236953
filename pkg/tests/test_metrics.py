import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gerkit.metrics import (
    Category,
    DEFAULT_WEIGHTS,
    EmptyInputError,
    EvaluationRecord,
    InvalidWeightsError,
    ScorerFailureError,
    SemScoreWeights,
    WerBreakdown,
    aggregate_report,
    dual_reference_evaluate,
    record_from_dict,
    record_to_dict,
    semscore,
    wer,
)
from gerkit.scorers import LexicalEntailmentScorer, LexicalOverlapScorer, PhoneticScorer, Scorer
from gerkit.transcript import normalize_tokens

from oracles import oracle_edit_distance

LOCAL_SCORERS = {
    "semantic": LexicalOverlapScorer(),
    "phonetic": PhoneticScorer(),
    "entailment": LexicalEntailmentScorer(),
}


class ConstantScorer(Scorer):
    name = "constant"

    def __init__(self, value: float):
        self.value = value

    def score(self, hyp, ref):
        return self.value


class FailingScorer(Scorer):
    name = "failing"

    def score(self, hyp, ref):
        raise RuntimeError("model exploded")


token_lists = st.lists(st.sampled_from(["a", "b", "c", "d", "e"]), max_size=8)


class TestWer:
    def test_identity_is_all_hits(self):
        b = wer(["a", "b"], ["a", "b"])
        assert (b.hits, b.errors, b.wer) == (2, 0, 0.0)

    def test_empty_reference_denominator_is_one(self):
        b = wer([], ["x", "y"])
        assert b.ref_len == 0
        assert b.insertions == 2
        assert b.wer == 2.0

    def test_empty_hypothesis_is_all_deletions(self):
        b = wer(["x", "y"], [])
        assert b.deletions == 2
        assert b.wer == 1.0

    def test_breakdown_prefers_hits_in_ties(self):
        # "a b" vs "b": deleting "a" keeps the hit on "b"
        b = wer(["a", "b"], ["b"])
        assert (b.hits, b.deletions, b.substitutions) == (1, 1, 0)

    def test_counts_satisfy_length_identity(self):
        b = wer("the cat sat".split(), "the bat".split())
        assert b.hits + b.substitutions + b.deletions == b.ref_len

    @given(token_lists, token_lists)
    def test_cost_matches_recursive_oracle(self, ref, hyp):
        b = wer(ref, hyp)
        assert b.errors == oracle_edit_distance(ref, hyp)
        assert b.hits + b.substitutions + b.deletions == len(ref)
        assert b.hits + b.substitutions + b.insertions == len(hyp)

    @given(token_lists)
    def test_wer_of_identical_sequences_is_zero(self, tokens):
        assert wer(tokens, tokens).wer == 0.0


class TestWeights:
    def test_default_thirds_sum_to_one(self):
        total = (
            DEFAULT_WEIGHTS.w_semantic + DEFAULT_WEIGHTS.w_phonetic + DEFAULT_WEIGHTS.w_entailment
        )
        assert math.isclose(total, 1.0, abs_tol=1e-9)

    @pytest.mark.parametrize("bad", [(0.5, 0.5, 0.5), (1.2, -0.1, -0.1), (0.0, 0.0, 0.0)])
    def test_invalid_weights_rejected(self, bad):
        with pytest.raises(InvalidWeightsError):
            SemScoreWeights(*bad)


class TestSemScore:
    def test_equal_texts_score_100_with_builtin_scorers(self):
        assert semscore("hello there", "hello there", LOCAL_SCORERS) == pytest.approx(100.0)

    def test_semantic_only_weights_pass_through_the_stub(self):
        scorers = dict(LOCAL_SCORERS, semantic=ConstantScorer(0.5))
        weights = SemScoreWeights(1.0, 0.0, 0.0)
        assert semscore("a", "b", scorers, weights) == pytest.approx(50.0)

    def test_component_failure_is_typed_and_named(self):
        scorers = dict(LOCAL_SCORERS, entailment=FailingScorer())
        with pytest.raises(ScorerFailureError) as info:
            semscore("a", "b", scorers)
        assert info.value.component == "entailment"

    def test_missing_component_is_a_failure(self):
        with pytest.raises(ScorerFailureError):
            semscore("a", "b", {"semantic": ConstantScorer(1.0)})

    def test_out_of_range_component_is_clamped(self):
        scorers = {
            "semantic": ConstantScorer(1.7),
            "phonetic": ConstantScorer(-0.4),
            "entailment": ConstantScorer(0.0),
        }
        assert semscore("a", "b", scorers, SemScoreWeights(1.0, 0.0, 0.0)) == pytest.approx(100.0)

    @given(st.floats(0, 1), st.floats(0, 1))
    def test_linear_in_each_component(self, low, high):
        base = {"phonetic": ConstantScorer(0.3), "entailment": ConstantScorer(0.7)}
        weights = SemScoreWeights(0.5, 0.25, 0.25)
        s_low = semscore("x", "y", dict(base, semantic=ConstantScorer(low)), weights)
        s_high = semscore("x", "y", dict(base, semantic=ConstantScorer(high)), weights)
        assert s_high - s_low == pytest.approx(100.0 * 0.5 * (high - low), abs=1e-9)
        assert 0.0 <= s_low <= 100.0


class TestDualReference:
    def test_hyp_matching_clean_selects_clean(self):
        scored = dual_reference_evaluate(
            "checkout",
            verbatim="(che- che-) checkout",
            clean="checkout",
            weights=DEFAULT_WEIGHTS,
            scorers=LOCAL_SCORERS,
        )
        assert scored.chosen_reference == "clean"
        assert scored.wer.wer == 0.0
        assert scored.semscore == pytest.approx(100.0)

    def test_hyp_matching_verbatim_selects_verbatim(self):
        scored = dual_reference_evaluate(
            "che- che- checkout",
            verbatim="(che- che-) checkout",
            clean="checkout",
            weights=DEFAULT_WEIGHTS,
            scorers=LOCAL_SCORERS,
        )
        assert scored.chosen_reference == "verbatim"
        assert scored.wer.wer == 0.0

    def test_tie_selects_verbatim(self):
        scored = dual_reference_evaluate(
            "anything",
            verbatim="same text",
            clean="same text",
            weights=DEFAULT_WEIGHTS,
            scorers=LOCAL_SCORERS,
        )
        assert scored.chosen_reference == "verbatim"

    def test_chosen_reference_drives_wer(self):
        scored = dual_reference_evaluate(
            "checkout",
            verbatim="(che- che-) checkout",
            clean="checkout",
            weights=DEFAULT_WEIGHTS,
            scorers=LOCAL_SCORERS,
        )
        assert scored.wer.ref_len == len(normalize_tokens("checkout"))

    @given(st.text(alphabet="abc ", max_size=20), st.text(alphabet="abc ", max_size=20))
    def test_identical_references_reduce_to_single_reference(self, hyp, ref):
        scored = dual_reference_evaluate(
            hyp, verbatim=ref, clean=ref, weights=DEFAULT_WEIGHTS, scorers=LOCAL_SCORERS
        )
        assert scored.chosen_reference == "verbatim"
        single = wer(normalize_tokens(ref), normalize_tokens(hyp))
        assert scored.wer == single


def make_record(uid, category, errors, ref_len, semscore_value):
    b = WerBreakdown(
        substitutions=errors,
        deletions=0,
        insertions=0,
        hits=ref_len - errors,
        ref_len=ref_len,
        wer=errors / max(1, ref_len),
    )
    return EvaluationRecord(
        utterance_id=uid,
        category=category,
        chosen_reference="verbatim",
        wer=b,
        semscore=semscore_value,
    )


class TestAggregateReport:
    def test_single_perfect_record(self):
        report = aggregate_report([make_record("u1", Category.DAC, 0, 5, 100.0)])
        assert report.overall.count == 1
        assert report.overall.wer == 0.0
        assert report.overall.semscore == 100.0

    def test_micro_average_weights_by_length(self):
        records = [
            make_record("u1", Category.SS, 1, 10, 90.0),
            make_record("u2", Category.SS, 3, 10, 70.0),
        ]
        report = aggregate_report(records)
        assert report.overall.wer == pytest.approx(20.0)
        assert report.overall.semscore == pytest.approx(80.0)

    def test_empty_categories_omitted(self):
        report = aggregate_report([make_record("u1", Category.SW, 0, 1, 100.0)])
        assert list(report.categories) == [Category.SW]

    def test_empty_input_rejected(self):
        with pytest.raises(EmptyInputError):
            aggregate_report([])

    def test_record_round_trips_through_dict(self):
        record = make_record("u9", Category.SN, 2, 7, 81.25)
        assert record_from_dict(record_to_dict(record)) == record

    @given(
        st.lists(
            st.tuples(st.integers(0, 3), st.integers(3, 12), st.floats(0, 100)),
            min_size=1,
            max_size=8,
        ),
        st.lists(
            st.tuples(st.integers(0, 3), st.integers(3, 12), st.floats(0, 100)),
            min_size=1,
            max_size=8,
        ),
    )
    def test_corpus_concatenation_combines_micro_averages(self, part_a, part_b):
        def build(part, prefix):
            return [
                make_record(f"{prefix}{i}", Category.DAC, e, n, s)
                for i, (e, n, s) in enumerate(part)
            ]

        records_a = build(part_a, "a")
        records_b = build(part_b, "b")
        merged = aggregate_report(records_a + records_b).overall
        a = aggregate_report(records_a).overall
        b = aggregate_report(records_b).overall
        combined = 100.0 * (a.errors + b.errors) / max(1, a.ref_len + b.ref_len)
        assert merged.wer == pytest.approx(combined)
