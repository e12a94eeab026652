"""Scene model: objects, user pose, spatial relations, and the probabilistic
scene graph.

A scene is a set of ground objects with symbolic attributes plus the user's
pose. The graph derived from it carries, per node, one probability
distribution per attribute category (smoothed one-hot over the category's
vocabulary, plus a two-way pointed/unpointed distribution driven by the
gesture scores) and, per directed edge, a distribution over spatial relation
labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .numerics import unit
from .vocab import ATTRIBUTE_CATEGORIES, POINTING_FLAGS, RELATIONS, Lexicon

if TYPE_CHECKING:  # pragma: no cover
    from .gesture import PointingResult

DEFAULT_NEAR_THRESHOLD = 0.5
DEFAULT_MAX_EDGE_DISTANCE = 3.0
DEFAULT_SMOOTHING = 0.05


@dataclass(frozen=True)
class UserPose:
    """User's head position and the horizontal direction they face."""

    head: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.6]))
    forward: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0]))

    def __post_init__(self):
        head = np.asarray(self.head, dtype=float)
        fwd = np.asarray(self.forward, dtype=float)
        if head.shape != (3,):
            raise ValueError("head position must be a 3-vector")
        if fwd.shape != (2,):
            raise ValueError("forward direction must be a 2-vector")
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "forward", unit(fwd))

    @property
    def right(self) -> np.ndarray:
        """Horizontal right-hand direction, 90° clockwise from forward."""
        return np.array([self.forward[1], -self.forward[0]])


@dataclass(frozen=True)
class SceneObject:
    id: str
    position: np.ndarray
    name: str
    color: str
    shape: str
    size: str

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        if pos.shape != (3,):
            raise ValueError(f"object '{self.id}': position must be a 3-vector")
        if not np.all(np.isfinite(pos)):
            raise ValueError(f"object '{self.id}': position must be finite")
        if abs(pos[2]) > 1e-9:
            raise ValueError(f"object '{self.id}': objects rest on the ground (z = 0)")
        object.__setattr__(self, "position", pos)

    def attribute(self, category: str) -> str:
        return {"name": self.name, "color": self.color,
                "shape": self.shape, "size": self.size}[category]


@dataclass(frozen=True)
class Scene:
    objects: tuple[SceneObject, ...]
    user: UserPose = field(default_factory=UserPose)

    def __post_init__(self):
        objects = tuple(self.objects)
        ids = [o.id for o in objects]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate object ids in scene")
        for i, a in enumerate(objects):
            for b in objects[i + 1:]:
                if np.array_equal(a.position, b.position):
                    raise ValueError(
                        f"objects '{a.id}' and '{b.id}' share an identical position")
        object.__setattr__(self, "objects", objects)

    def __len__(self) -> int:
        return len(self.objects)

    def index_of(self, object_id: str) -> int:
        for i, obj in enumerate(self.objects):
            if obj.id == object_id:
                return i
        raise KeyError(f"no object with id '{object_id}'")

    def positions(self) -> np.ndarray:
        """Ground-plane (x, y) positions as an (N, 2) array."""
        return np.array([o.position[:2] for o in self.objects])


def classify_relation(a: np.ndarray, b: np.ndarray, user: UserPose,
                      near_threshold: float = DEFAULT_NEAR_THRESHOLD) -> str:
    """Spatial relation of position `b` as seen from `a` in the user's frame.

    Within `near_threshold` ground distance the pair is "near"; otherwise the
    dominant axis of the displacement decides, with the lateral axis winning
    ties. "front" means closer to the user.
    """
    a = np.asarray(a, dtype=float)[:2]
    b = np.asarray(b, dtype=float)[:2]
    u = b - a
    dist = float(np.linalg.norm(u))
    if dist == 0.0:
        raise ValueError("coincident objects have no spatial relation")
    if dist < near_threshold:
        return "near"
    u_r = float(u @ user.right)
    u_f = float(u @ user.forward)
    if abs(u_r) >= abs(u_f):
        return "right" if u_r > 0 else "left"
    return "back" if u_f > 0 else "front"


INVERSE_RELATION = {"left": "right", "right": "left",
                    "front": "back", "back": "front", "near": "near"}


def smoothed_onehot(vocab_size: int, index: int, alpha: float) -> np.ndarray:
    """Probability vector putting 1 - alpha on `index`, alpha spread elsewhere."""
    if not 0 <= index < vocab_size:
        raise ValueError("index outside vocabulary")
    if vocab_size == 1:
        return np.array([1.0])
    probs = np.full(vocab_size, alpha / (vocab_size - 1))
    probs[index] = 1.0 - alpha
    return probs


@dataclass(frozen=True)
class GraphNode:
    object_id: str
    # category -> probability vector over the category's attribute vocabulary
    attributes: dict[str, np.ndarray]


@dataclass(frozen=True)
class GraphEdge:
    src: int
    dst: int
    probs: np.ndarray  # over RELATIONS


@dataclass(frozen=True)
class SceneGraph:
    nodes: tuple[GraphNode, ...]
    edges: tuple[GraphEdge, ...]
    lexicon: Lexicon

    def __len__(self) -> int:
        return len(self.nodes)


def build_scene_graph(scene: Scene, lexicon: Lexicon,
                      pointing: "PointingResult | np.ndarray | None" = None,
                      *, alpha: float = DEFAULT_SMOOTHING,
                      near_threshold: float = DEFAULT_NEAR_THRESHOLD,
                      max_edge_distance: float = DEFAULT_MAX_EDGE_DISTANCE) -> SceneGraph:
    """Derive the probabilistic graph for a scene.

    Symbolic attributes become smoothed one-hot distributions; the pointing
    scores (which sum to 1 across objects) fill each node's pointed/unpointed
    slot, defaulting to a uniform 1/N when no gesture is supplied. Every
    ordered pair of objects within `max_edge_distance` on the ground plane
    gets a directed edge whose relation distribution is the smoothed one-hot
    of the classified relation.
    """
    if not scene.objects:
        raise ValueError("cannot build a graph for an empty scene")
    if not 0 <= alpha < 1:
        raise ValueError("smoothing alpha must lie in [0, 1)")

    n = len(scene.objects)
    if pointing is None:
        scores = np.full(n, 1.0 / n)
    else:
        scores = np.asarray(getattr(pointing, "scores", pointing), dtype=float)
        if scores.shape != (n,):
            raise ValueError(f"pointing scores have shape {scores.shape}, expected ({n},)")

    nodes = []
    for obj, score in zip(scene.objects, scores):
        attrs: dict[str, np.ndarray] = {}
        for cat in ATTRIBUTE_CATEGORIES:
            if cat == "demonstrative":
                attrs[cat] = np.array([score, 1.0 - score])
                continue
            vocab = lexicon.attribute_vocab(cat)
            token = obj.attribute(cat)
            try:
                idx = vocab.index(token)
            except ValueError:
                raise ValueError(
                    f"object '{obj.id}': {cat} token '{token}' not in lexicon"
                ) from None
            attrs[cat] = smoothed_onehot(len(vocab), idx, alpha)
        nodes.append(GraphNode(object_id=obj.id, attributes=attrs))

    edges = []
    for i, a in enumerate(scene.objects):
        for j, b in enumerate(scene.objects):
            if i == j:
                continue
            dist = float(np.linalg.norm(a.position[:2] - b.position[:2]))
            if dist > max_edge_distance:
                continue
            rel = classify_relation(a.position, b.position, scene.user, near_threshold)
            probs = smoothed_onehot(len(RELATIONS), RELATIONS.index(rel), alpha)
            edges.append(GraphEdge(src=i, dst=j, probs=probs))

    return SceneGraph(nodes=tuple(nodes), edges=tuple(edges), lexicon=lexicon)


# --- serialization ---------------------------------------------------------

def scene_to_dict(scene: Scene) -> dict:
    return {
        "user": {"head_position": scene.user.head.tolist(),
                 "forward": scene.user.forward.tolist()},
        "objects": [
            {"id": o.id, "position": o.position.tolist(),
             "name": o.name, "color": o.color, "shape": o.shape, "size": o.size}
            for o in scene.objects
        ],
    }


def scene_from_dict(data: dict) -> Scene:
    user_data = data.get("user") or {}
    head = user_data.get("head_position", user_data.get("head", [0.0, 0.0, 1.6]))
    user = UserPose(
        head=np.asarray(head, dtype=float),
        forward=np.asarray(user_data.get("forward", [1.0, 0.0]), dtype=float),
    )
    objects = tuple(
        SceneObject(id=o["id"], position=np.asarray(o["position"], dtype=float),
                    name=o["name"], color=o["color"], shape=o["shape"], size=o["size"])
        for o in data["objects"]
    )
    return Scene(objects=objects, user=user)
