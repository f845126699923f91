"""Subtitle-driven segmentation and keyword filtering."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .text import tokenize

DEFAULT_T_SHIFT = 5.0


@dataclass(frozen=True)
class SegmentSpec:
    bundle_id: str
    start_ms: int
    end_ms: int
    transcript: str
    matched_keywords: tuple[str, ...] = ()
    entry_index: int = 0

    @property
    def id(self) -> str:
        return f"{self.bundle_id}:{self.start_ms}-{self.end_ms}:{self.entry_index}"

    def to_dict(self) -> dict:
        return {
            "bundle_id": self.bundle_id,
            "start_ms": self.start_ms,
            "end_ms": self.end_ms,
            "transcript": self.transcript,
            "matched_keywords": list(self.matched_keywords),
            "entry_index": self.entry_index,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "SegmentSpec":
        return cls(d["bundle_id"], int(d["start_ms"]), int(d["end_ms"]), d["transcript"],
                   tuple(d.get("matched_keywords", ())), int(d.get("entry_index", 0)))


@dataclass(frozen=True)
class KeywordDictionary:
    """Set of lowercase token sequences."""

    keywords: frozenset[tuple[str, ...]] = field(default_factory=frozenset)

    @classmethod
    def from_phrases(cls, phrases: Iterable[str]) -> "KeywordDictionary":
        seqs = {tuple(tokenize(p)) for p in phrases}
        seqs.discard(())
        return cls(frozenset(seqs))

    def phrases(self) -> list[str]:
        return sorted(" ".join(k) for k in self.keywords)

    def __len__(self):
        return len(self.keywords)

    def __contains__(self, phrase) -> bool:
        key = tuple(tokenize(phrase)) if isinstance(phrase, str) else tuple(phrase)
        return key in self.keywords

    def __or__(self, other: "KeywordDictionary") -> "KeywordDictionary":
        return KeywordDictionary(self.keywords | other.keywords)


def read_keywords(path) -> KeywordDictionary:
    """Keyword file: one keyword per line, ``#`` starts a comment."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return KeywordDictionary.from_phrases(ln.split("#", 1)[0] for ln in lines)


def default_keywords() -> KeywordDictionary:
    text = resources.files("playtriage.data").joinpath("keywords.txt").read_text(encoding="utf-8")
    return KeywordDictionary.from_phrases(ln.split("#", 1)[0] for ln in text.splitlines())


def read_synonyms(path) -> dict[str, list[str]]:
    """Synonym lexicon: JSON object mapping a token to an array of phrases."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict) or not all(isinstance(v, list) for v in raw.values()):
        raise ValueError(f"{path}: expected a JSON object of token -> list of strings")
    return {str(k): [str(x) for x in v] for k, v in raw.items()}


def compute_segments(entries: Sequence, t: float, duration_ms: int,
                     bundle_id: str = "") -> list[SegmentSpec]:
    """One segment per subtitle entry, widened by ``t`` seconds on each side.

    The interval is ``[max(s - t, 0), min(s + d + t, duration)]`` in integer
    milliseconds. Entries collapsing to an empty interval are dropped.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    shift = int(round(t * 1000))
    out = []
    for e in entries:
        start = max(e.start_ms - shift, 0)
        end = min(e.end_ms + shift, duration_ms)
        if start < end:
            out.append(SegmentSpec(bundle_id, start, end, e.text, (), e.index))
    return out


def expand_keywords(base: KeywordDictionary,
                    synonyms: Mapping[str, Iterable[str]]) -> list[str]:
    """Candidate keywords from the Cartesian product of per-token synonyms.

    Each token's synonym set implicitly contains the token itself. Base
    keywords are excluded from the result; the output is sorted.
    """
    syn_lookup = {k.lower(): v for k, v in synonyms.items()}
    candidates: set[tuple[str, ...]] = set()
    for kw in base.keywords:
        options = []
        for tok in kw:
            alts = {(tok,)}
            alts.update(tuple(tokenize(s)) for s in syn_lookup.get(tok, ()))
            alts.discard(())
            options.append(sorted(alts))
        for combo in itertools.product(*options):
            seq = tuple(itertools.chain.from_iterable(combo))
            if seq not in base.keywords:
                candidates.add(seq)
    return sorted(" ".join(c) for c in candidates)


def match_keywords(text: str, dictionary: KeywordDictionary) -> list[str]:
    """Dictionary entries occurring as contiguous token runs of ``text``, sorted."""
    tokens = tokenize(text)
    lengths = sorted({len(k) for k in dictionary.keywords})
    found = set()
    for n in lengths:
        for i in range(len(tokens) - n + 1):
            seq = tuple(tokens[i:i + n])
            if seq in dictionary.keywords:
                found.add(" ".join(seq))
    return sorted(found)


def filter_segments(segments: Iterable[SegmentSpec],
                    dictionary: KeywordDictionary) -> list[SegmentSpec]:
    if not len(dictionary):
        raise ValueError("keyword dictionary is empty")
    kept = []
    for seg in segments:
        matched = match_keywords(seg.transcript, dictionary)
        if matched:
            kept.append(replace(seg, matched_keywords=tuple(matched)))
    return kept
