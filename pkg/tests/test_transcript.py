import pytest
from hypothesis import given
from hypothesis import strategies as st

from gerkit.transcript import (
    AnnotatedTranscript,
    NestedBracketsError,
    SpanKind,
    UnbalancedBracketsError,
    asr_target,
    clean_reference,
    normalize_tokens,
    normalized_text,
    parse_annotations,
    verbatim_reference,
)


class TestParseAnnotations:
    def test_partial_word_attempt_yields_one_disfluency_span(self):
        t = parse_annotations("(che- che-) checkout")
        assert len(t.spans) == 1
        span = t.spans[0]
        assert span.kind is SpanKind.DISFLUENCY
        assert span.inner == "che- che-"
        assert t.raw[span.end:] == " checkout"

    def test_plain_text_has_no_spans(self):
        t = parse_annotations("hello world")
        assert t.spans == ()
        assert t.raw == "hello world"

    def test_prompt_and_tagged_aside(self):
        t = parse_annotations("[Q?] yes (ss: thanks)")
        kinds = [s.kind for s in t.spans]
        assert kinds == [SpanKind.PROMPT_CONTEXT, SpanKind.SPEAKER_ASIDE]
        assert t.spans[0].inner == "Q?"
        assert t.spans[1].inner == "thanks"

    def test_interviewer_tag_is_case_insensitive(self):
        t = parse_annotations("(CS: please continue) okay")
        assert t.spans[0].kind is SpanKind.INTERVIEWER_SPEECH
        assert t.spans[0].inner == "please continue"

    def test_untagged_round_span_is_disfluency(self):
        t = parse_annotations("(um) yes")
        assert t.spans[0].kind is SpanKind.DISFLUENCY

    def test_spans_are_sorted_and_non_overlapping(self):
        t = parse_annotations("[a] b (c) d (ss: e)")
        starts = [s.start for s in t.spans]
        assert starts == sorted(starts)
        for left, right in zip(t.spans, t.spans[1:]):
            assert left.end <= right.start

    @pytest.mark.parametrize("raw", ["(unclosed", "[unclosed", "stray)", "stray]", "(mis]"])
    def test_unbalanced_brackets_rejected(self, raw):
        with pytest.raises(UnbalancedBracketsError) as info:
            parse_annotations(raw)
        assert info.value.position >= 0

    def test_nested_brackets_rejected_with_position(self):
        with pytest.raises(NestedBracketsError) as info:
            parse_annotations("(a [b] c)")
        assert info.value.position == 3

    def test_reconstruct_is_byte_identical(self):
        raw = "[What?] (che- che-) checkout (cs: go on) done (ss: phew)"
        assert parse_annotations(raw).reconstruct() == raw


class TestDerivedTexts:
    def test_asr_target_removes_prompt(self):
        assert asr_target(parse_annotations("[Q?] play music")) == "play music"

    def test_asr_target_keeps_disfluency_verbatim(self):
        assert asr_target(parse_annotations("(che- che-) checkout")) == "(che- che-) checkout"

    def test_asr_target_of_empty_is_empty(self):
        assert asr_target(parse_annotations("")) == ""

    def test_verbatim_reference_equals_asr_target(self):
        t = parse_annotations("[Q?] (um) my pet")
        assert verbatim_reference(t) == asr_target(t) == "(um) my pet"

    def test_verbatim_reference_identity_without_annotations(self):
        assert verbatim_reference(parse_annotations("demo")) == "demo"

    def test_verbatim_reference_keeps_partial_attempt(self):
        assert verbatim_reference(parse_annotations("(d-*) demo")) == "(d-*) demo"

    def test_clean_reference_strips_disfluency(self):
        assert clean_reference(parse_annotations("(che- che-) checkout")) == "checkout"

    def test_clean_reference_strips_prompt_and_interviewer(self):
        assert clean_reference(parse_annotations("[Q?] (cs: go on) I like dogs")) == "I like dogs"

    def test_clean_reference_identity_on_plain_text(self):
        assert clean_reference(parse_annotations("plain text")) == "plain text"

    def test_removed_span_never_merges_neighbours(self):
        # "a[x]b" must not collapse into token "ab"
        assert clean_reference(parse_annotations("a[x]b")) == "a b"


class TestNormalizeTokens:
    def test_reference_sentence(self):
        got = normalize_tokens("My favorite pet is the one that sits on my lap.")
        assert got == ["my", "favorite", "pet", "is", "the", "one", "that", "sits", "on", "my", "lap"]

    def test_partial_attempt_markers_survive(self):
        assert normalize_tokens("(d-*) demo") == ["d-*", "demo"]

    def test_empty_input(self):
        assert normalize_tokens("") == []

    def test_apostrophes_drop_in_place(self):
        assert normalize_tokens("that's") == ["thats"]

    def test_bare_punctuation_tokens_drop(self):
        assert normalize_tokens("- -- !") == []


# Raw-corpus strategy: gap text plus annotated spans of all four kinds.
_gap = st.text(alphabet="abcdefgh -'*,.?!", min_size=0, max_size=12)
_inner = st.text(alphabet="abcdefgh -'*", min_size=1, max_size=10).map(str.strip).filter(bool)


@st.composite
def annotated_raw(draw):
    pieces = [draw(_gap)]
    for _ in range(draw(st.integers(0, 4))):
        shape = draw(st.sampled_from(["[{}]", "({})", "(cs: {})", "(ss: {})"]))
        pieces.append(shape.format(draw(_inner)))
        pieces.append(draw(_gap))
    return "".join(pieces)


@given(annotated_raw())
def test_round_trip_property(raw):
    assert parse_annotations(raw).reconstruct() == raw


@given(annotated_raw())
def test_clean_tokens_are_subsequence_of_verbatim_tokens(raw):
    t = parse_annotations(raw)
    clean = normalize_tokens(clean_reference(t))
    verbatim = normalize_tokens(verbatim_reference(t))
    it = iter(verbatim)
    assert all(token in it for token in clean)


@given(annotated_raw())
def test_asr_target_contains_no_square_brackets(raw):
    target = asr_target(parse_annotations(raw))
    assert "[" not in target and "]" not in target


@given(st.text(max_size=60))
def test_normalize_is_idempotent(s):
    once = normalize_tokens(s)
    assert normalize_tokens(" ".join(once)) == once


@given(st.text(max_size=60))
def test_normalized_text_joins_tokens(s):
    assert normalized_text(s) == " ".join(normalize_tokens(s))
