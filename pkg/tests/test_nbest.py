import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gerkit.nbest import (
    DuplicateRankError,
    EmptySegmentsError,
    Hypothesis,
    InvalidKError,
    MalformedDocumentError,
    NBestList,
    RankGapError,
    Segment,
    SegmentedNBest,
    concat_segments,
    levenshtein,
    normalized_edit_distance,
    parse_nbest_file,
    parse_nbest_lines,
    select_diverse,
    write_nbest_file,
)

from oracles import naive_select, oracle_edit_distance


def make_pool(texts, utterance_id="u1"):
    return NBestList(
        utterance_id=utterance_id,
        hypotheses=tuple(Hypothesis(rank=i + 1, text=t) for i, t in enumerate(texts)),
    )


def make_segmented(segment_texts, utterance_id="u1"):
    segments = tuple(
        Segment(hypotheses=tuple(Hypothesis(rank=i + 1, text=t) for i, t in enumerate(texts)))
        for texts in segment_texts
    )
    return SegmentedNBest(utterance_id=utterance_id, segments=segments)


class TestContainers:
    def test_rank_below_one_rejected(self):
        with pytest.raises(ValueError):
            Hypothesis(rank=0, text="x")

    def test_empty_text_is_legitimate(self):
        assert Hypothesis(rank=1, text="").text == ""

    def test_duplicate_ranks_rejected(self):
        with pytest.raises(DuplicateRankError):
            NBestList("u", (Hypothesis(1, "a"), Hypothesis(1, "b")))

    def test_rank_gap_rejected(self):
        with pytest.raises(RankGapError):
            NBestList("u", (Hypothesis(1, "a"), Hypothesis(3, "b")))

    def test_increasing_scores_rejected(self):
        with pytest.raises(MalformedDocumentError):
            NBestList("u", (Hypothesis(1, "a", score=-2.0), Hypothesis(2, "b", score=-1.0)))

    def test_hypotheses_sorted_by_rank(self):
        pool = NBestList("u", (Hypothesis(2, "b"), Hypothesis(1, "a")))
        assert [h.rank for h in pool.hypotheses] == [1, 2]


class TestConcatSegments:
    def test_single_segment_is_identity_with_scores_dropped(self):
        s = make_segmented([["a", "b"]])
        merged = concat_segments(s)
        assert [(h.rank, h.text, h.score) for h in merged.hypotheses] == [
            (1, "a", None),
            (2, "b", None),
        ]

    def test_equal_depth_segments_join_rank_wise(self):
        merged = concat_segments(make_segmented([["a", "b"], ["c", "d"]]))
        assert [h.text for h in merged.hypotheses] == ["a c", "b d"]

    def test_shorter_segment_pads_with_last_ranked_text(self):
        merged = concat_segments(make_segmented([["a", "b"], ["c"]]))
        assert [h.text for h in merged.hypotheses] == ["a c", "b c"]

    def test_empty_segment_contributes_empty_string(self):
        merged = concat_segments(make_segmented([["a", "b"], []]))
        assert [h.text for h in merged.hypotheses] == ["a ", "b "]

    def test_no_segments_rejected(self):
        with pytest.raises(EmptySegmentsError):
            concat_segments(SegmentedNBest(utterance_id="u", segments=()))

    @given(
        st.lists(
            st.lists(st.text(alphabet="abc ", max_size=6), min_size=1, max_size=5),
            min_size=1,
            max_size=4,
        )
    )
    def test_rank_one_is_join_of_top_hypotheses(self, segment_texts):
        merged = concat_segments(make_segmented(segment_texts))
        assert merged.hypotheses[0].text == " ".join(texts[0] for texts in segment_texts)
        assert len(merged.hypotheses) == max(len(texts) for texts in segment_texts)


class TestNormalizedEditDistance:
    def test_identity(self):
        assert normalized_edit_distance("abc", "abc") == 0.0

    def test_all_insertions(self):
        assert normalized_edit_distance("", "ab") == 1.0

    def test_single_substitution(self):
        assert normalized_edit_distance("abc", "abd") == pytest.approx(1 / 3)

    def test_both_empty_defined_as_zero(self):
        assert normalized_edit_distance("", "") == 0.0

    @given(st.text(max_size=12), st.text(max_size=12))
    def test_symmetric_and_bounded(self, a, b):
        d = normalized_edit_distance(a, b)
        assert d == normalized_edit_distance(b, a)
        assert 0.0 <= d <= 1.0

    @given(st.text(alphabet="abcde", max_size=7), st.text(alphabet="abcde", max_size=7))
    def test_levenshtein_matches_recursive_oracle(self, a, b):
        assert levenshtein(a, b) == oracle_edit_distance(a, b)


class TestSelectDiverse:
    def test_pool_not_larger_than_k_selects_everything(self):
        result = select_diverse(make_pool(["a", "b", "c", "d", "e"]), 5)
        assert result.selection_order == (1, 2, 3, 4, 5)
        assert [r for r, _ in result.selected] == [1, 2, 3, 4, 5]

    def test_identical_texts_fall_back_to_rank_order(self):
        result = select_diverse(make_pool(["same"] * 6), 3)
        assert {r for r, _ in result.selected} == {1, 2, 3}

    def test_k_below_one_rejected(self):
        with pytest.raises(InvalidKError):
            select_diverse(make_pool(["a"]), 0)

    def test_rank_one_always_selected(self):
        result = select_diverse(make_pool(["aaaa", "bbbb", "cccc", "dddd"]), 2)
        assert result.selected[0][0] == 1

    def test_matches_naive_greedy_on_fixed_instance(self):
        texts = ["cat sat", "cat sat.", "dog ran", "a cat sat", "dogs ran", "bird", "cat", "sat"]
        result = select_diverse(make_pool(texts), 3)
        want_sorted, want_order = naive_select(texts, 3)
        assert [r - 1 for r, _ in result.selected] == want_sorted
        assert [r - 1 for r in result.selection_order] == want_order

    def test_selected_is_ordered_by_rank_even_when_picks_are_not(self):
        texts = ["alpha beta", "alpha betas", "gamma delta", "epsilon zeta"]
        result = select_diverse(make_pool(texts), 3)
        ranks = [r for r, _ in result.selected]
        assert ranks == sorted(ranks)

    def test_distances_use_normalized_text(self):
        # Case and punctuation differences alone look like duplicates.
        texts = ["Hello World.", "hello world", "HELLO, WORLD", "something else"]
        result = select_diverse(make_pool(texts), 2)
        assert {r for r, _ in result.selected} == {1, 4}


class TestWireFormat:
    def test_minimal_document_round_trips(self):
        raw = b'{"utterance_id": "u", "segments": [{"start_s": null, "end_s": null, "hypotheses": [{"rank": 1, "text": "hi", "score": null}]}]}'
        doc = parse_nbest_file(raw)
        assert json.loads(write_nbest_file(doc)) == json.loads(raw)

    def test_rank_gap_in_document_rejected(self):
        raw = json.dumps(
            {
                "utterance_id": "u",
                "segments": [
                    {
                        "start_s": 0,
                        "end_s": 1,
                        "hypotheses": [
                            {"rank": 1, "text": "a", "score": None},
                            {"rank": 3, "text": "b", "score": None},
                        ],
                    }
                ],
            }
        )
        with pytest.raises(RankGapError):
            parse_nbest_file(raw)

    def test_invalid_utf8_rejected_with_typed_error(self):
        with pytest.raises(MalformedDocumentError):
            parse_nbest_file(b"\xff\xfe{}")

    def test_non_json_rejected(self):
        with pytest.raises(MalformedDocumentError):
            parse_nbest_file(b"not json")

    def test_newline_in_text_rejected(self):
        raw = json.dumps(
            {
                "utterance_id": "u",
                "segments": [{"hypotheses": [{"rank": 1, "text": "a\nb"}]}],
            }
        )
        with pytest.raises(MalformedDocumentError):
            parse_nbest_file(raw)

    def test_zero_segments_accepted(self):
        doc = parse_nbest_file(b'{"utterance_id": "silent", "segments": []}')
        assert doc.segments == ()

    def test_jsonl_batch_reports_line_numbers(self):
        lines = b'{"utterance_id": "a", "segments": []}\n\nnot json\n'
        with pytest.raises(MalformedDocumentError) as info:
            parse_nbest_lines(lines)
        assert "line 3" in str(info.value)

    @given(
        st.lists(
            st.lists(
                st.text(alphabet="ab c", max_size=8).filter(lambda t: "\n" not in t),
                min_size=0,
                max_size=4,
            ),
            min_size=0,
            max_size=3,
        )
    )
    def test_round_trip_any_document(self, segment_texts):
        doc = make_segmented(segment_texts, utterance_id="rt")
        again = parse_nbest_file(write_nbest_file(doc))
        assert again == doc
