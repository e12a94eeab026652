"""Differentiable program execution over probabilistic scene graphs.

Attention starts uniform over objects and is updated once per program step.
Each step embeds its token as a query vector r and carries a relevance
distribution R over the six step types. Node affinity mixes the five
attribute channels: every node's expected attribute embedding is compared to
r through a per-channel square matrix, channels weighted by R, squashed by a
sigmoid. Edge affinity compares r to expected relation embeddings through a
sixth matrix. Two candidate attention states are formed — one reweighting
nodes by their own affinity, one routing attention along incoming edges
weighted by edge affinity — each sharpened by a low-temperature softmax, and
the step's relation relevance interpolates between them.

Only the six square matrices are trained (plain SGD on the cross-entropy of
the final attention against the gold object); embeddings and graphs stay
fixed. Gradients are computed by hand in reverse over a recorded forward
tape.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingProvider
from .instruction import Step, StepType
from .numerics import sigmoid, softmax
from .scene import SceneGraph
from .vocab import ATTRIBUTE_CATEGORIES, RELATIONS

# The six trained matrix slots: five attribute channels plus edge relations.
W_KEYS: tuple[str, ...] = ATTRIBUTE_CATEGORIES + ("rel",)
ATTR_KEYS: tuple[str, ...] = ATTRIBUTE_CATEGORIES
_REL_INDEX = int(StepType.RELATION)

DEFAULT_TEMPERATURE = 0.1


@dataclass(frozen=True)
class TrainConfig:
    """Knobs for fit(): plain SGD from an identity-plus-noise start."""

    lr: float = 0.05
    epochs: int = 30
    batch_size: int = 1
    seed: int = 0
    init_noise: float = 0.01

    def __post_init__(self):
        if self.lr <= 0 or self.batch_size <= 0:
            raise ValueError("lr and batch_size must be positive")
        if self.epochs < 0 or self.init_noise < 0:
            raise ValueError("epochs and init_noise must be non-negative")


@dataclass
class ReasonerParams:
    """The trainable state: one (dim x dim) matrix per channel."""

    dim: int
    temperature: float = DEFAULT_TEMPERATURE
    W: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("dim must be positive")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if not self.W:
            self.W = {key: np.eye(self.dim) for key in W_KEYS}
        if set(self.W) != set(W_KEYS):
            raise ValueError(f"params must define matrices for {list(W_KEYS)}")
        for key, mat in self.W.items():
            mat = np.asarray(mat, dtype=float)
            if mat.shape != (self.dim, self.dim):
                raise ValueError(f"W['{key}'] must be {self.dim}x{self.dim}")
            self.W[key] = mat

    def copy(self) -> "ReasonerParams":
        return ReasonerParams(self.dim, self.temperature,
                              {k: v.copy() for k, v in self.W.items()})


def identity_params(dim: int, temperature: float = DEFAULT_TEMPERATURE) -> ReasonerParams:
    return ReasonerParams(dim=dim, temperature=temperature)


def init_params(dim: int, seed: int = 0, noise: float = 0.01,
                temperature: float = DEFAULT_TEMPERATURE) -> ReasonerParams:
    """Training start point: identity matrices plus seeded uniform noise.

    Identity already scores matching attributes above mismatches, so training
    only has to reshape the channels the data actually exercises; zero noise
    gives exact identities.
    """
    if noise < 0:
        raise ValueError("noise must be non-negative")
    rng = np.random.default_rng(seed)
    W = {}
    for key in W_KEYS:
        mat = np.eye(dim)
        if noise > 0:
            mat = mat + rng.uniform(-noise, noise, size=(dim, dim))
        W[key] = mat
    return ReasonerParams(dim=dim, temperature=temperature, W=W)


def random_params(dim: int, temperature: float = DEFAULT_TEMPERATURE,
                  seed: int = 0, scale: float = 0.5) -> ReasonerParams:
    rng = np.random.default_rng(seed)
    W = {key: scale * rng.standard_normal((dim, dim)) for key in W_KEYS}
    return ReasonerParams(dim=dim, temperature=temperature, W=W)


def save_params(params: ReasonerParams, path) -> None:
    data = {
        "dim": params.dim,
        "temperature": params.temperature,
        "W": {key: mat.tolist() for key, mat in params.W.items()},
    }
    Path(path).write_text(json.dumps(data), encoding="utf-8")


def load_params(path) -> ReasonerParams:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return ReasonerParams(
        dim=int(data["dim"]),
        temperature=float(data["temperature"]),
        W={key: np.asarray(mat, dtype=float) for key, mat in data["W"].items()},
    )


# --- graph and program in array form ---------------------------------------

@dataclass(frozen=True)
class GraphArrays:
    """A scene graph reduced to the arrays the update rule consumes.

    S maps each attribute channel to the (N, d) matrix of expected attribute
    embeddings (probability-weighted token embeddings); E holds the (M, d)
    expected relation embeddings of the directed edges.
    """

    S: dict[str, np.ndarray]
    edge_src: np.ndarray
    edge_dst: np.ndarray
    E: np.ndarray
    node_ids: tuple[str, ...]

    @property
    def num_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def num_edges(self) -> int:
        return int(self.edge_src.size)


def embed_graph(graph: SceneGraph, embedder: EmbeddingProvider) -> GraphArrays:
    """Collapse a probabilistic graph to expected-embedding arrays."""
    S: dict[str, np.ndarray] = {}
    for cat in ATTR_KEYS:
        vocab = graph.lexicon.attribute_vocab(cat)
        token_vecs = embedder.embed_all(vocab)
        probs = np.array([node.attributes[cat] for node in graph.nodes])
        S[cat] = probs @ token_vecs
    rel_vecs = embedder.embed_all(RELATIONS)
    if graph.edges:
        src = np.array([e.src for e in graph.edges], dtype=int)
        dst = np.array([e.dst for e in graph.edges], dtype=int)
        E = np.array([e.probs for e in graph.edges]) @ rel_vecs
    else:
        src = np.zeros(0, dtype=int)
        dst = np.zeros(0, dtype=int)
        E = np.zeros((0, embedder.dim))
    return GraphArrays(S=S, edge_src=src, edge_dst=dst, E=E,
                       node_ids=tuple(n.object_id for n in graph.nodes))


def embed_program(steps: list[Step], embedder: EmbeddingProvider) -> tuple[np.ndarray, np.ndarray]:
    """Step tokens and relevances as (K, d) and (K, num step types) arrays."""
    if not steps:
        raise ValueError("program has no steps")
    r = embedder.embed_all([s.token for s in steps])
    R = np.array([s.relevance for s in steps])
    return r, R


@dataclass(frozen=True)
class CompiledEpisode:
    """Everything the trainer needs for one example."""

    graph: GraphArrays
    steps_r: np.ndarray  # (K, d)
    steps_R: np.ndarray  # (K, len(StepType))
    gold: int


# --- forward / backward -----------------------------------------------------

def uniform_attention(n: int) -> np.ndarray:
    if n <= 0:
        raise ValueError("need at least one node")
    return np.full(n, 1.0 / n)


def node_relevance(params: ReasonerParams, r: np.ndarray, R: np.ndarray,
                   node_attrs: dict[str, np.ndarray]) -> float:
    """Affinity of one step to one node: a sigmoid over the attribute
    channels, each channel's inner product ⟨r, W_j s_j⟩ weighted by the
    step's relevance to that channel (the relation slot does not enter)."""
    r = np.asarray(r, dtype=float)
    if r.shape != (params.dim,):
        raise ValueError("step embedding does not match the parameter dimension")
    total = 0.0
    for j, key in enumerate(ATTR_KEYS):
        coef = float(R[j])
        if coef != 0.0:
            s = np.asarray(node_attrs[key], dtype=float)
            if s.shape != (params.dim,):
                raise ValueError(
                    f"node '{key}' embedding does not match the parameter dimension")
            total += coef * float(r @ (params.W[key] @ s))
    return float(sigmoid(total))


def edge_relevance(params: ReasonerParams, r: np.ndarray, e: np.ndarray) -> float:
    """Affinity of one step to one edge: sigmoid of ⟨r, W_rel e⟩."""
    r = np.asarray(r, dtype=float)
    e = np.asarray(e, dtype=float)
    if r.shape != (params.dim,) or e.shape != (params.dim,):
        raise ValueError("embedding does not match the parameter dimension")
    return float(sigmoid(float(r @ (params.W["rel"] @ e))))


def _forward_step(params: ReasonerParams, g: GraphArrays,
                  r: np.ndarray, R: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, dict]:
    tau = params.temperature
    a = np.zeros(g.num_nodes)
    for j, key in enumerate(ATTR_KEYS):
        coef = float(R[j])
        if coef != 0.0:
            a += coef * (g.S[key] @ (params.W[key].T @ r))
    gam_s = sigmoid(a)
    ps = softmax(p * gam_s / tau)

    ur = np.zeros(g.num_nodes)
    if g.num_edges:
        gam_e = sigmoid(g.E @ (params.W["rel"].T @ r))
        np.add.at(ur, g.edge_dst, p[g.edge_src] * gam_e)
    else:
        gam_e = np.zeros(0)
    pr = softmax(ur / tau)

    rp = float(R[_REL_INDEX])
    p_next = rp * pr + (1.0 - rp) * ps
    tape = {"r": r, "R": R, "p": p, "gam_s": gam_s, "ps": ps,
            "gam_e": gam_e, "pr": pr, "rp": rp}
    return p_next, tape


def step_update(params: ReasonerParams, g: GraphArrays, r: np.ndarray,
                R: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, dict]:
    """One attention update; returns the new attention and the step's
    intermediate quantities (node/edge affinities and both candidates)."""
    if p.shape != (g.num_nodes,):
        raise ValueError("attention vector does not match node count")
    return _forward_step(params, g, r, R, p)


def run_program(params: ReasonerParams, g: GraphArrays, steps_r: np.ndarray,
                steps_R: np.ndarray) -> tuple[np.ndarray, list[dict]]:
    """Execute all steps from uniform attention; returns (final p, tapes)."""
    p = uniform_attention(g.num_nodes)
    tapes = []
    for r, R in zip(steps_r, steps_R):
        p, tape = _forward_step(params, g, r, R, p)
        tapes.append(tape)
    return p, tapes


def _backward(params: ReasonerParams, g: GraphArrays, tapes: list[dict],
              grad_p: np.ndarray) -> dict[str, np.ndarray]:
    """Reverse pass over recorded tapes; gradient of the loss w.r.t. each W."""
    tau = params.temperature
    grads = {key: np.zeros_like(params.W[key]) for key in W_KEYS}
    gp = grad_p
    for tape in reversed(tapes):
        r, R, p = tape["r"], tape["R"], tape["p"]
        gam_s, ps = tape["gam_s"], tape["ps"]
        gam_e, pr, rp = tape["gam_e"], tape["pr"], tape["rp"]

        gps = (1.0 - rp) * gp
        gpr = rp * gp
        # softmax(z/tau) backward
        du = ps * (gps - float(ps @ gps)) / tau
        dv = pr * (gpr - float(pr @ gpr)) / tau

        dp = du * gam_s
        dgam_s = du * p
        da = dgam_s * gam_s * (1.0 - gam_s)
        for j, key in enumerate(ATTR_KEYS):
            coef = float(R[j])
            if coef != 0.0:
                grads[key] += coef * np.outer(r, g.S[key].T @ da)

        if g.num_edges:
            edge_flow = dv[g.edge_dst]
            np.add.at(dp, g.edge_src, edge_flow * gam_e)
            dgam_e = edge_flow * p[g.edge_src]
            db = dgam_e * gam_e * (1.0 - gam_e)
            grads["rel"] += np.outer(r, g.E.T @ db)

        gp = dp
    return grads


def nll(p: np.ndarray, gold: int) -> float:
    """Cross-entropy of the final attention against the gold object."""
    return -float(np.log(max(float(p[gold]), 1e-12)))


def episode_loss(params: ReasonerParams, ep: CompiledEpisode) -> float:
    p, _ = run_program(params, ep.graph, ep.steps_r, ep.steps_R)
    return nll(p, ep.gold)


def episode_loss_and_grad(params: ReasonerParams,
                          ep: CompiledEpisode) -> tuple[float, dict[str, np.ndarray]]:
    p, tapes = run_program(params, ep.graph, ep.steps_r, ep.steps_R)
    gold_p = max(float(p[ep.gold]), 1e-12)
    grad_p = np.zeros_like(p)
    grad_p[ep.gold] = -1.0 / gold_p
    grads = _backward(params, ep.graph, tapes, grad_p)
    return -float(np.log(gold_p)), grads


def predict(params: ReasonerParams, ep: CompiledEpisode) -> int:
    p, _ = run_program(params, ep.graph, ep.steps_r, ep.steps_R)
    return int(np.argmax(p))


def evaluate(params: ReasonerParams, episodes) -> dict:
    """Mean cross-entropy, argmax accuracy, and per-episode predictions."""
    if not episodes:
        raise ValueError("no episodes to evaluate")
    losses = []
    predictions = []
    correct = 0
    for ep in episodes:
        p, _ = run_program(params, ep.graph, ep.steps_r, ep.steps_R)
        losses.append(nll(p, ep.gold))
        pred = int(np.argmax(p))
        predictions.append(pred)
        correct += int(pred == ep.gold)
    return {"loss": float(np.mean(losses)),
            "accuracy": correct / len(episodes),
            "count": len(episodes),
            "predictions": predictions}


def fit(params: ReasonerParams, episodes, *, epochs: int, lr: float,
        batch_size: int = 1, seed: int = 0, val_episodes=None,
        callback=None) -> list[dict]:
    """Plain SGD over episodes, reshuffled every epoch.

    Batches are consecutive chunks of the shuffled order; a batch's gradient
    is the sum of its episodes' gradients and is applied in one step. Zero
    epochs is a valid no-op (params stay at their initialization). Mutates
    `params` in place and returns one history entry per epoch with the
    running train loss/accuracy (and validation metrics when given).
    """
    if not episodes:
        raise ValueError("no training episodes")
    if epochs < 0 or lr <= 0 or batch_size <= 0:
        raise ValueError("epochs must be >= 0; lr and batch_size positive")
    rng = np.random.default_rng(seed)
    order = np.arange(len(episodes))
    history = []
    for epoch in range(1, epochs + 1):
        rng.shuffle(order)
        losses = []
        correct = 0
        for lo in range(0, order.size, batch_size):
            batch = order[lo:lo + batch_size]
            acc: dict[str, np.ndarray] | None = None
            for i in batch:
                ep = episodes[int(i)]
                p, tapes = run_program(params, ep.graph, ep.steps_r, ep.steps_R)
                gold_p = max(float(p[ep.gold]), 1e-12)
                losses.append(-float(np.log(gold_p)))
                correct += int(np.argmax(p) == ep.gold)
                grad_p = np.zeros_like(p)
                grad_p[ep.gold] = -1.0 / gold_p
                grads = _backward(params, ep.graph, tapes, grad_p)
                if acc is None:
                    acc = grads
                else:
                    for key in W_KEYS:
                        acc[key] += grads[key]
            for key in W_KEYS:
                params.W[key] -= lr * acc[key]
        entry = {"epoch": epoch, "loss": float(np.mean(losses)),
                 "accuracy": correct / len(episodes)}
        if val_episodes:
            val = evaluate(params, val_episodes)
            entry["val_loss"] = val["loss"]
            entry["val_accuracy"] = val["accuracy"]
        history.append(entry)
        if callback is not None:
            callback(entry)
    return history
