"""Token embeddings.

Three interchangeable sources feed the reasoner:

- ``hash``: deterministic pseudo-random unit vectors derived from the token
  text, so any token — including one never seen before — gets a stable
  embedding without a vocabulary file.
- ``file``: a whitespace-separated text table (token followed by its vector),
  with hashed fallback for out-of-vocabulary tokens.
- ``onehot``: an exact standard-basis table over a fixed token list; unknown
  tokens are an error. Used for small analytic test scenes.

Category prototypes (the mean direction of a category's vocabulary) support
soft classification of instruction words.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .numerics import unit
from .vocab import Lexicon

DEFAULT_DIM = 50


def hashed_vector(token: str, dim: int, oov_seed: int = 0) -> np.ndarray:
    """Deterministic unit vector for a token, independent of process state."""
    digest = hashlib.blake2b(f"{oov_seed}:{token}".encode("utf-8"),
                             digest_size=8).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "big"))
    return unit(rng.standard_normal(dim))


def hash_embeddings(tokens, dim: int = DEFAULT_DIM, oov_seed: int = 0) -> dict[str, np.ndarray]:
    return {t: hashed_vector(t, dim, oov_seed) for t in tokens}


def onehot_embeddings(tokens) -> dict[str, np.ndarray]:
    """Standard-basis table over `tokens`, in the given order."""
    tokens = list(tokens)
    dim = len(tokens)
    table = {}
    for i, tok in enumerate(tokens):
        v = np.zeros(dim)
        v[i] = 1.0
        table[tok] = v
    return table


def load_embeddings(path, dim: int | None = None) -> tuple[dict[str, np.ndarray], int]:
    """Read a whitespace text table: one token and its vector per line.

    Blank lines are skipped. All vectors must share one dimension; `dim`, if
    given, pins what that dimension must be. An empty file is a valid empty
    table (then `dim` is required to fix the dimension).
    """
    table: dict[str, np.ndarray] = {}
    found_dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) < 2:
                raise ValueError(f"{path}:{lineno}: expected a token and a vector")
            token = parts[0]
            try:
                vec = np.array([float(x) for x in parts[1:]])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-numeric vector entry") from exc
            if found_dim is None:
                found_dim = vec.size
                if dim is not None and found_dim != dim:
                    raise ValueError(
                        f"{path}:{lineno}: vectors have dimension {found_dim}, expected {dim}")
            elif vec.size != found_dim:
                raise ValueError(
                    f"{path}:{lineno}: vector has dimension {vec.size}, expected {found_dim}")
            table[token] = vec
    if found_dim is None:
        if dim is None:
            raise ValueError(f"{path}: empty embedding file needs an explicit dimension")
        found_dim = dim
    return table, found_dim


class EmbeddingProvider:
    """Maps tokens to vectors with mode-dependent out-of-vocabulary behavior."""

    def __init__(self, dim: int = DEFAULT_DIM, mode: str = "hash",
                 table: dict[str, np.ndarray] | None = None, oov_seed: int = 0):
        if mode not in ("hash", "file", "onehot"):
            raise ValueError(f"unknown embedding mode '{mode}'")
        if mode in ("file", "onehot") and table is None:
            raise ValueError(f"embedding mode '{mode}' needs a table")
        self.dim = int(dim)
        self.mode = mode
        self.table = dict(table) if table else {}
        self.oov_seed = int(oov_seed)
        for tok, vec in self.table.items():
            if np.asarray(vec).shape != (self.dim,):
                raise ValueError(f"embedding for '{tok}' has the wrong dimension")
        self._hash_cache: dict[str, np.ndarray] = {}

    @classmethod
    def from_file(cls, path, dim: int | None = None, oov_seed: int = 0) -> "EmbeddingProvider":
        table, found_dim = load_embeddings(path, dim)
        return cls(dim=found_dim, mode="file", table=table, oov_seed=oov_seed)

    def embed(self, token: str) -> np.ndarray:
        if token in self.table:
            return self.table[token]
        if self.mode == "onehot":
            raise KeyError(f"token '{token}' not in one-hot embedding table")
        cached = self._hash_cache.get(token)
        if cached is None:
            cached = hashed_vector(token, self.dim, self.oov_seed)
            self._hash_cache[token] = cached
        return cached

    def embed_all(self, tokens) -> np.ndarray:
        """(len(tokens), dim) matrix, rows in token order."""
        tokens = list(tokens)
        if not tokens:
            return np.zeros((0, self.dim))
        return np.stack([self.embed(t) for t in tokens])

    def prototype(self, lexicon: Lexicon, category: str) -> np.ndarray:
        """Unit mean of the category's vocabulary embeddings."""
        toks = lexicon.vocab(category)
        return unit(self.embed_all(toks).mean(axis=0))
