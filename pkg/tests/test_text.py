import logging

import numpy as np
import pytest
from hypothesis import given, strategies as st

from playtriage.text import (EmbeddingTable, Vocabulary, bow_vector, build_vocab, embed_average,
                             load_embeddings, tokenize)


def test_tokenize():
    assert tokenize("The game CRASHED!") == ["the", "game", "crashed"]
    assert tokenize("FPS-drop 2x") == ["fps", "drop", "2x"]
    assert tokenize("") == []


def test_build_vocab():
    assert build_vocab(["bug here", "bug gone"]).tokens == ["bug", "gone", "here"]
    assert build_vocab(["a a a"]).tokens == ["a"]
    assert build_vocab(["x", "y"]).tokens == ["x", "y"]


def test_vocab_round_trip(tmp_path):
    v = build_vocab(["zeta alpha", "mid"])
    v.save(tmp_path / "v.json")
    assert Vocabulary.load(tmp_path / "v.json") == v


def test_bow():
    v = Vocabulary(["bug", "crash", "lag"])
    assert bow_vector(["crash", "crash", "bug"], v).tolist() == [1, 2, 0]
    assert bow_vector(["zzz"], v).tolist() == [0, 0, 0]
    assert bow_vector([], v).tolist() == [0, 0, 0]


@given(st.lists(st.sampled_from(["bug", "crash", "lag", "oov", "x"]), max_size=20))
def test_bow_sum(tokens):
    v = Vocabulary(["bug", "crash", "lag"])
    assert bow_vector(tokens, v).sum() == sum(t in {"bug", "crash", "lag"} for t in tokens)


TABLE = EmbeddingTable({"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0])}, 2)


def test_embed_average():
    assert embed_average(["a", "b"], TABLE).tolist() == [0.5, 0.5]
    assert embed_average(["a"], TABLE).tolist() == [1.0, 0.0]
    assert embed_average(["q", "r"], TABLE).tolist() == [0.0, 0.0]


@given(st.lists(st.sampled_from(["a", "b", "c"]), min_size=1, max_size=10), st.randoms())
def test_embed_average_properties(tokens, rnd):
    base = embed_average(tokens, TABLE)
    shuffled = list(tokens)
    rnd.shuffle(shuffled)
    assert np.allclose(embed_average(shuffled, TABLE), base)
    assert np.allclose(embed_average(tokens * 2, TABLE), base)


def test_load_embeddings(tmp_path):
    p = tmp_path / "e.txt"
    p.write_text("2 2\na 1 0\nb 0 1\n")
    t = load_embeddings(p)
    assert len(t) == 2 and t.dim == 2
    assert t.vectors["b"].tolist() == [0.0, 1.0]


@pytest.mark.parametrize("content", ["", "2 3\na 1 0\nb 0 1\n", "3 2\na 1 0\nb 0 1\n"])
def test_load_embeddings_errors(tmp_path, content):
    p = tmp_path / "e.txt"
    p.write_text(content)
    with pytest.raises(ValueError):
        load_embeddings(p)


def test_duplicate_token_last_wins(tmp_path, caplog):
    p = tmp_path / "e.txt"
    p.write_text("2 2\na 1 0\na 0 1\n")
    with caplog.at_level(logging.WARNING):
        t = load_embeddings(p)
    assert t.vectors["a"].tolist() == [0.0, 1.0]
    assert "duplicate" in caplog.text
