"""Transcript features: bag of words and averaged word embeddings."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

log = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric runs, in order. No stemming, stopwords kept."""
    return _TOKEN_RE.findall(text.lower())


class Vocabulary:
    """Sorted token list with a dense index map."""

    def __init__(self, tokens: Iterable[str]):
        self.tokens = sorted({t.lower() for t in tokens})
        self.index = {t: i for i, t in enumerate(self.tokens)}

    def __len__(self):
        return len(self.tokens)

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self.tokens == other.tokens

    def __repr__(self):
        return f"Vocabulary({len(self)} tokens)"

    def save(self, path) -> None:
        Path(path).write_text("".join(t + "\n" for t in self.tokens), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        return cls(ln for ln in lines if ln)


def build_vocab(transcripts: Sequence[str]) -> Vocabulary:
    if not transcripts:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    return Vocabulary(tok for doc in transcripts for tok in tokenize(doc))


def bow_vector(tokens: Sequence[str], vocab: Vocabulary) -> np.ndarray:
    """Raw occurrence counts; out-of-vocabulary tokens are ignored."""
    v = np.zeros(len(vocab), dtype=float)
    for tok in tokens:
        j = vocab.index.get(tok)
        if j is not None:
            v[j] += 1
    return v


@dataclass
class EmbeddingTable:
    vectors: dict[str, np.ndarray]
    dim: int

    def __len__(self):
        return len(self.vectors)

    def __contains__(self, token):
        return token in self.vectors


def load_embeddings(path) -> EmbeddingTable:
    """Read a word2vec text file (``count dim`` header, then ``token v1 .. vdim``)."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: missing 'count dim' header")
        count, dim = int(header[0]), int(header[1])
        vectors: dict[str, np.ndarray] = {}
        n_lines = 0
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").rstrip().split(" ")
            if not parts or parts == [""]:
                continue
            n_lines += 1
            token, values = parts[0], parts[1:]
            if len(values) != dim:
                raise ValueError(f"{path}:{lineno}: expected {dim} values, got {len(values)}")
            if token in vectors:
                log.warning("%s:%d: duplicate token %r, keeping the last vector", path, lineno, token)
            vectors[token] = np.array(values, dtype=float)
    if n_lines != count:
        raise ValueError(f"{path}: header announces {count} vectors, found {n_lines}")
    return EmbeddingTable(vectors, dim)


def embed_average(tokens: Sequence[str], table: EmbeddingTable) -> np.ndarray:
    """Mean embedding of in-table tokens; zero vector when none are known."""
    known = [table.vectors[t] for t in tokens if t in table.vectors]
    if not known:
        return np.zeros(table.dim, dtype=float)
    return np.mean(known, axis=0)


def embedding_feature_names(dim: int) -> list[str]:
    return [f"w2v_{i:03d}" for i in range(dim)]
