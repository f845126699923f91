import math

import pytest
from hypothesis import given, strategies as st

from playtriage.corpus import SubtitleEntry
from playtriage.segmenter import (KeywordDictionary, SegmentSpec, compute_segments,
                                  default_keywords, expand_keywords, filter_segments,
                                  match_keywords, read_keywords)


def mmss(m, s):
    return (m * 60 + s) * 1000


class TestComputeSegments:
    def test_reaction_shift(self):
        # 13:45 lasting 3 s, shifted by 5 s on both sides
        e = SubtitleEntry(1, mmss(13, 45), mmss(13, 48), "x")
        (seg,) = compute_segments([e], 5, mmss(20, 0), "v")
        assert (seg.start_ms, seg.end_ms) == (mmss(13, 40), mmss(13, 53))

    def test_inclusive_end_stamp(self):
        # a cue stamped 13:45 -> 13:47 (three displayed seconds) ends at 13:52
        e = SubtitleEntry(1, mmss(13, 45), mmss(13, 47), "x")
        (seg,) = compute_segments([e], 5, mmss(20, 0), "v")
        assert (seg.start_ms, seg.end_ms) == (mmss(13, 40), mmss(13, 52))

    def test_clamped_both_ends(self):
        e = SubtitleEntry(1, 4000, 7000, "x")
        (seg,) = compute_segments([e], 10, 20000)
        assert (seg.start_ms, seg.end_ms) == (0, 17000)

    def test_zero_shift_is_identity(self):
        e = SubtitleEntry(1, 1234, 5678, "x")
        (seg,) = compute_segments([e], 0, 10000)
        assert (seg.start_ms, seg.end_ms) == (1234, 5678)
        assert seg.transcript == "x"

    def test_degenerate_entry_dropped(self):
        assert compute_segments([SubtitleEntry(1, 500, 500, "x")], 0, 1000) == []

    def test_overlaps_are_kept(self):
        es = [SubtitleEntry(1, 1000, 2000, "a"), SubtitleEntry(2, 2000, 3000, "b")]
        a, b = compute_segments(es, 1, 10000)
        assert a.end_ms > b.start_ms

    def test_negative_shift_rejected(self):
        with pytest.raises(ValueError):
            compute_segments([], -1, 10)

    @given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 5), st.integers(1, 2 * 10 ** 6),
           st.floats(0, 30), st.floats(0, 30))
    def test_formula_and_monotonicity(self, s, d, duration, t1, t2):
        t1, t2 = sorted((t1, t2))
        e = SubtitleEntry(1, s, s + d, "x")
        segs1 = compute_segments([e], t1, duration)
        segs2 = compute_segments([e], t2, duration)
        sh1 = int(round(t1 * 1000))
        start, end = max(s - sh1, 0), min(s + d + sh1, duration)
        if start < end:
            (a,) = segs1
            assert (a.start_ms, a.end_ms) == (start, end)
            (b,) = segs2
            assert b.start_ms <= a.start_ms and a.end_ms <= b.end_ms
        else:
            assert segs1 == []


class TestExpandKeywords:
    def test_single_token_synonyms(self):
        base = KeywordDictionary.from_phrases(["lag"])
        cands = expand_keywords(base, {"lag": ["stuttering", "FPS drop"]})
        assert "stuttering" in cands and "fps drop" in cands
        assert "lag" not in cands

    def test_cartesian_product(self):
        base = KeywordDictionary.from_phrases(["screen freeze"])
        cands = expand_keywords(base, {"screen": ["screen", "display"], "freeze": ["hang"]})
        assert cands == ["display freeze", "display hang", "screen hang"]

    def test_no_synonyms(self):
        assert expand_keywords(KeywordDictionary.from_phrases(["bug"]), {"bug": []}) == []
        assert expand_keywords(KeywordDictionary.from_phrases(["bug"]), {}) == []

    @given(st.dictionaries(st.sampled_from(["a", "b", "c"]),
                           st.lists(st.sampled_from(["x", "y z", "a", "q"]), max_size=4)))
    def test_size_bound(self, syn):
        kw = "a b c"
        base = KeywordDictionary.from_phrases([kw])
        bound = math.prod(len({t} | set(syn.get(t, []))) for t in kw.split())
        assert len(expand_keywords(base, syn)) <= bound


class TestFilterSegments:
    def seg(self, text):
        return SegmentSpec("v", 0, 1000, text)

    def test_kept_with_match(self):
        d = KeywordDictionary.from_phrases(["glitch", "bug"])
        (s,) = filter_segments([self.seg("oh no another glitch again")], d)
        assert s.matched_keywords == ("glitch",)

    def test_dropped_without_match(self):
        assert filter_segments([self.seg("nice view from here")], default_keywords()) == []

    def test_multi_token_case_insensitive(self):
        d = KeywordDictionary.from_phrases(["fps drop"])
        (s,) = filter_segments([self.seg("the FPS Drop was brutal")], d)
        assert s.matched_keywords == ("fps drop",)

    def test_token_boundaries(self):
        d = KeywordDictionary.from_phrases(["bug"])
        assert filter_segments([self.seg("debugging is fun")], d) == []
        assert match_keywords("bug, bug... BUG!", d) == ["bug"]

    def test_all_matches_reported(self):
        d = KeywordDictionary.from_phrases(["crash", "game crash", "lag"])
        assert match_keywords("Game crash and then lag", d) == ["crash", "game crash", "lag"]

    def test_empty_dictionary_rejected(self):
        with pytest.raises(ValueError):
            filter_segments([], KeywordDictionary())

    @given(st.lists(st.text("glitch bug nice view FPS drop ,.!", max_size=40), max_size=12))
    def test_subset_and_idempotent(self, texts):
        d = KeywordDictionary.from_phrases(["glitch", "fps drop"])
        segs = [SegmentSpec("v", i, i + 1, t, (), i) for i, t in enumerate(texts)]
        once = filter_segments(segs, d)
        assert {s.entry_index for s in once} <= {s.entry_index for s in segs}
        assert filter_segments(once, d) == once


def test_keyword_file(tmp_path):
    p = tmp_path / "kw.txt"
    p.write_text("# comment\nGlitch\n\nscreen  freeze  # trailing\nbug\nbug\n")
    d = read_keywords(p)
    assert d.phrases() == ["bug", "glitch", "screen freeze"]


def test_default_keywords_nonempty():
    d = default_keywords()
    assert "glitch" in d and "fps drop" in d
    assert all(k for k in d.keywords)
