"""Shared fixtures: a small exact-arithmetic world and dataset factories."""

from __future__ import annotations

import numpy as np
import pytest

from pointref.embeddings import EmbeddingProvider, onehot_embeddings
from pointref.reasoner import identity_params
from pointref.scene import Scene, SceneObject, UserPose
from pointref.vocab import Lexicon

# A compact lexicon whose one-hot embedding space stays small enough for
# closed-form checks.
MINI_LEXICON = Lexicon(
    names=("cube", "ball", "tool", "clipper", "drill"),
    colors=("red", "blue", "black", "white"),
    shapes=("round", "square"),
    sizes=("small", "big"),
)


def make_object(oid: str, x: float, y: float, *, name="cube", color="red",
                shape="round", size="small") -> SceneObject:
    return SceneObject(id=oid, position=(x, y, 0.0), name=name, color=color,
                       shape=shape, size=size)


@pytest.fixture(scope="session")
def mini_lexicon() -> Lexicon:
    return MINI_LEXICON


@pytest.fixture(scope="session")
def onehot_embedder(mini_lexicon) -> EmbeddingProvider:
    table = onehot_embeddings(mini_lexicon.all_tokens())
    return EmbeddingProvider(dim=len(table), mode="onehot", table=table)


@pytest.fixture()
def identity_reasoner(onehot_embedder):
    return identity_params(onehot_embedder.dim)


@pytest.fixture()
def two_cube_scene() -> Scene:
    """A red cube and a blue cube, close enough to share edges."""
    return Scene(objects=(
        make_object("obj0", 1.0, 0.0, name="cube", color="red"),
        make_object("obj1", 1.5, 0.0, name="cube", color="blue"),
    ), user=UserPose())


def crafted_demonstrative_params(embedder):
    """Identity parameters plus one planted weight.

    The weight couples the deictic step token to the pointed flag, so a
    deictic step scales node support by sigmoid(8 * pointing score) — enough
    to flip an otherwise symmetric two-object tie.
    """
    params = identity_params(embedder.dim)
    i_this = int(np.argmax(embedder.embed("this")))
    i_pointed = int(np.argmax(embedder.embed("pointed")))
    params.W["demonstrative"][i_this, i_pointed] = 8.0
    return params


def random_episode(rng: np.random.Generator, dim: int, *, num_nodes=3,
                   num_steps=3, num_edges=4):
    """A dense random compiled episode for gradient checks.

    Attribute and relation embedding matrices are arbitrary dense arrays —
    the update rule and its gradient make no one-hot assumptions.
    """
    from pointref.reasoner import ATTR_KEYS, CompiledEpisode, GraphArrays

    S = {cat: rng.standard_normal((num_nodes, dim)) for cat in ATTR_KEYS}
    src = rng.integers(0, num_nodes, size=num_edges)
    dst = (src + 1 + rng.integers(0, num_nodes - 1, size=num_edges)) % num_nodes
    E = rng.standard_normal((num_edges, dim))
    graph = GraphArrays(S=S, edge_src=src, edge_dst=dst, E=E,
                        node_ids=tuple(f"obj{i}" for i in range(num_nodes)))
    steps_r = rng.standard_normal((num_steps, dim))
    raw = rng.uniform(0.2, 1.0, size=(num_steps, 6))
    steps_R = raw / raw.sum(axis=1, keepdims=True)
    gold = int(rng.integers(num_nodes))
    return CompiledEpisode(graph=graph, steps_r=steps_r, steps_R=steps_R,
                           gold=gold)
