"""Embedding sources: hashed vectors, file tables, one-hot bases."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pointref.embeddings import (
    EmbeddingProvider,
    hashed_vector,
    load_embeddings,
    onehot_embeddings,
)

TOKEN = st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=12)


@given(TOKEN)
def test_hashed_vectors_are_unit_norm(token):
    v = hashed_vector(token, 16)
    assert np.isclose(np.linalg.norm(v), 1.0)


@given(TOKEN)
def test_hashed_vectors_deterministic(token):
    assert np.array_equal(hashed_vector(token, 16), hashed_vector(token, 16))


def test_hashed_vectors_differ_across_tokens_and_seeds():
    a = hashed_vector("cube", 32)
    b = hashed_vector("ball", 32)
    c = hashed_vector("cube", 32, oov_seed=1)
    assert not np.allclose(a, b)
    assert not np.allclose(a, c)


def test_onehot_embeddings_form_standard_basis():
    table = onehot_embeddings(["a", "b", "c"])
    assert np.array_equal(table["a"], [1, 0, 0])
    assert np.array_equal(table["c"], [0, 0, 1])


def test_onehot_provider_rejects_unknown_token():
    table = onehot_embeddings(["a", "b"])
    provider = EmbeddingProvider(dim=2, mode="onehot", table=table)
    with pytest.raises(KeyError, match="zzz"):
        provider.embed("zzz")


def test_hash_provider_handles_any_token():
    provider = EmbeddingProvider(dim=8, mode="hash")
    v = provider.embed("neverseen")
    assert v.shape == (8,)
    assert np.array_equal(v, provider.embed("neverseen"))


def test_file_provider_falls_back_to_hash_for_oov(tmp_path):
    path = tmp_path / "vecs.txt"
    path.write_text("cube 1 0 0\nball 0 1 0\n")
    provider = EmbeddingProvider.from_file(path)
    assert np.array_equal(provider.embed("cube"), [1, 0, 0])
    oov = provider.embed("mug")
    assert oov.shape == (3,)
    assert np.array_equal(oov, hashed_vector("mug", 3))


def test_load_embeddings_reports_line_numbers(tmp_path):
    path = tmp_path / "vecs.txt"
    path.write_text("cube 1 0 0\nball 0 1\n")
    with pytest.raises(ValueError, match=":2:"):
        load_embeddings(path)
    path.write_text("cube 1 x 0\n")
    with pytest.raises(ValueError, match=":1:"):
        load_embeddings(path)
    path.write_text("cube\n")
    with pytest.raises(ValueError, match=":1:"):
        load_embeddings(path)


def test_load_embeddings_pins_expected_dimension(tmp_path):
    path = tmp_path / "vecs.txt"
    path.write_text("cube 1 0 0\n")
    with pytest.raises(ValueError, match="expected 5"):
        load_embeddings(path, dim=5)


def test_empty_embedding_file_is_a_valid_empty_table(tmp_path):
    path = tmp_path / "vecs.txt"
    path.write_text("")
    table, dim = load_embeddings(path, dim=4)
    assert table == {} and dim == 4
    with pytest.raises(ValueError, match="dimension"):
        load_embeddings(path)


def test_provider_validates_table_dimensions():
    with pytest.raises(ValueError, match="wrong dimension"):
        EmbeddingProvider(dim=3, mode="file", table={"cube": np.ones(2)})


def test_embed_all_stacks_in_order(mini_lexicon, onehot_embedder):
    mat = onehot_embedder.embed_all(["red", "blue"])
    assert mat.shape == (2, onehot_embedder.dim)
    assert np.array_equal(mat[0], onehot_embedder.embed("red"))


def test_prototype_is_unit_mean_of_category(mini_lexicon, onehot_embedder):
    proto = onehot_embedder.prototype(mini_lexicon, "color")
    vecs = onehot_embedder.embed_all(mini_lexicon.colors)
    expected = vecs.mean(axis=0)
    expected /= np.linalg.norm(expected)
    assert np.allclose(proto, expected)
