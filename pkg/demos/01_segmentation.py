"""Cutting a commentary track into segments and keeping the ones that mention an issue."""

from playtriage.corpus import parse_subtitles
from playtriage.segmenter import (KeywordDictionary, compute_segments, default_keywords,
                                  expand_keywords, filter_segments)

# %% parse a caption file
raw = """WEBVTT

00:13:45.000 --> 00:13:48.000
the game crashed

00:14:02.000 --> 00:14:04.500
nice view from up here

00:14:10.000 --> 00:14:12.000
wait, did the texture just <i>glitch</i>?
"""
entries = parse_subtitles(raw, "vtt")
for e in entries:
    print(e.start_ms, e.end_ms, repr(e.text))

# %% shift each entry by t seconds on both sides (reaction time of the streamer)
segments = compute_segments(entries, t=5, duration_ms=20 * 60 * 1000, bundle_id="demo")
for s in segments:
    print(s.id, s.transcript)

# %% keep segments whose tokens contain a keyword sequence
kw = default_keywords()
kept = filter_segments(segments, kw)
print([(s.transcript, s.matched_keywords) for s in kept])

# %% candidate keywords from a synonym lexicon (every combination of token synonyms)
base = KeywordDictionary.from_phrases(["screen freeze", "lag"])
print(expand_keywords(base, {"screen": ["display"], "freeze": ["hang"],
                             "lag": ["stuttering", "fps drop"]}))
