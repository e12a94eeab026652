"""End-to-end wiring: instructions, scenes, and gestures into the reasoner.

This module owns the glue the CLI and the HTTP service share: building an
embedding provider from user-facing options, compiling a dataset episode (or
an ad-hoc request) into the arrays the reasoner consumes, training over a
dataset split, and resolving a single scene+instruction(+pointing) query into
a prediction with an optional per-step trace.
"""

from __future__ import annotations

import numpy as np

from .datagen import Dataset, Episode
from .embeddings import DEFAULT_DIM, EmbeddingProvider, onehot_embeddings
from .gesture import (
    DEFAULT_CLICK_BANDWIDTH,
    DetectionParams,
    GestureTrajectory,
    PointingResult,
    click_pointing,
    estimate_pointing,
)
from .instruction import (
    STOPWORDS,
    Step,
    compile_instruction,
    extract_program,
    parse_conllu,
    step_to_dict,
    tokenize,
)
from .reasoner import (
    CompiledEpisode,
    ReasonerParams,
    TrainConfig,
    embed_graph,
    embed_program,
    evaluate,
    fit,
    init_params,
    run_program,
    uniform_attention,
)
from .scene import Scene, build_scene_graph
from .vocab import DEFAULT_LEXICON, DEMONSTRATIVES, Lexicon


def make_embedder(mode: str = "hash", dim: int = DEFAULT_DIM,
                  path=None, oov_seed: int = 0,
                  lexicon: Lexicon | None = None) -> EmbeddingProvider:
    """Build the provider the CLI/service flags describe.

    "hash" needs nothing; "file" reads a vector table from `path`; "onehot"
    spans the lexicon's full token list (dimension = vocabulary size).
    """
    if mode == "hash":
        return EmbeddingProvider(dim=dim, mode="hash", oov_seed=oov_seed)
    if mode == "file":
        if path is None:
            raise ValueError("file embedding mode needs a vector file path")
        return EmbeddingProvider.from_file(path, oov_seed=oov_seed)
    if mode == "onehot":
        if lexicon is None:
            raise ValueError("one-hot embedding mode needs a lexicon")
        table = onehot_embeddings(lexicon.all_tokens())
        return EmbeddingProvider(dim=len(table), mode="onehot", table=table)
    raise ValueError(f"unknown embedding mode '{mode}'")


def program_for(instruction: str | None = None, conllu: str | None = None,
                lexicon: Lexicon | None = None,
                stopwords: frozenset[str] = STOPWORDS,
                embedder: EmbeddingProvider | None = None) -> list[Step]:
    """Typed program from raw text (template grammar) or CoNLL-U input."""
    if (instruction is None) == (conllu is None):
        raise ValueError("provide exactly one of instruction text or CoNLL-U input")
    lexicon = lexicon if lexicon is not None else DEFAULT_LEXICON
    if conllu is not None:
        return extract_program(parse_conllu(conllu), lexicon, stopwords, embedder)
    return compile_instruction(instruction, lexicon, stopwords, embedder)


def pointing_for(scene: Scene, trajectory: GestureTrajectory | None = None,
                 click=None, no_gesture: bool = False,
                 detection: DetectionParams = DetectionParams(),
                 click_bandwidth: float = DEFAULT_CLICK_BANDWIDTH
                 ) -> PointingResult | None:
    """The pointing evidence for a request, or None for none at all."""
    if no_gesture:
        return None
    if trajectory is not None and click is not None:
        raise ValueError("provide a trajectory or a click point, not both")
    if trajectory is not None:
        return estimate_pointing(trajectory, scene, detection)
    if click is not None:
        return click_pointing(scene, click, click_bandwidth)
    return None


def has_demonstrative(instruction: str) -> bool:
    return any(tok in DEMONSTRATIVES for tok in tokenize(instruction))


def compile_episode(ep: Episode, lexicon: Lexicon, embedder: EmbeddingProvider,
                    *, no_gesture: bool = False,
                    detection: DetectionParams = DetectionParams()) -> CompiledEpisode:
    """Turn a stored episode into the arrays the trainer consumes."""
    pointing = pointing_for(ep.scene, trajectory=ep.trajectory,
                            no_gesture=no_gesture, detection=detection)
    graph = build_scene_graph(ep.scene, lexicon, pointing)
    steps = program_for(instruction=ep.instruction if ep.conllu is None else None,
                        conllu=ep.conllu, lexicon=lexicon, embedder=embedder)
    arrays = embed_graph(graph, embedder)
    steps_r, steps_R = embed_program(steps, embedder)
    return CompiledEpisode(graph=arrays, steps_r=steps_r, steps_R=steps_R,
                           gold=ep.scene.index_of(ep.gold_id))


def compile_split(dataset: Dataset, split: str, embedder: EmbeddingProvider,
                  *, no_gesture: bool = False,
                  demonstrative_only: bool = False) -> list[CompiledEpisode]:
    episodes = dataset.split_episodes(split)
    if demonstrative_only:
        episodes = [ep for ep in episodes if has_demonstrative(ep.instruction)]
    return [compile_episode(ep, dataset.lexicon, embedder, no_gesture=no_gesture)
            for ep in episodes]


def train_on_dataset(dataset: Dataset, embedder: EmbeddingProvider,
                     config: TrainConfig = TrainConfig(),
                     split: str = "train") -> tuple[ReasonerParams, list[dict]]:
    episodes = compile_split(dataset, split, embedder)
    params = init_params(embedder.dim, seed=config.seed, noise=config.init_noise)
    history = fit(params, episodes, epochs=config.epochs, lr=config.lr,
                  batch_size=config.batch_size, seed=config.seed)
    return params, history


def evaluate_split(params: ReasonerParams, dataset: Dataset, split: str,
                   embedder: EmbeddingProvider, *, no_gesture: bool = False,
                   demonstrative_only: bool = False) -> dict:
    episodes = compile_split(dataset, split, embedder, no_gesture=no_gesture,
                             demonstrative_only=demonstrative_only)
    if not episodes:
        raise ValueError(f"split '{split}' has no matching episodes")
    return evaluate(params, episodes)


def _trace_entries(steps: list[Step], tapes: list[dict],
                   final_p: np.ndarray) -> list[dict]:
    entries = []
    for k, (step, tape) in enumerate(zip(steps, tapes)):
        p_after = tapes[k + 1]["p"] if k + 1 < len(tapes) else final_p
        entries.append({
            "step": step_to_dict(step),
            "gamma_nodes": [float(x) for x in tape["gam_s"]],
            "gamma_edges": [float(x) for x in tape["gam_e"]],
            "p_s": [float(x) for x in tape["ps"]],
            "p_r": [float(x) for x in tape["pr"]],
            "p": [float(x) for x in p_after],
            "r_prime": float(tape["rp"]),
        })
    return entries


def resolve(scene: Scene, params: ReasonerParams, lexicon: Lexicon,
            embedder: EmbeddingProvider, *,
            instruction: str | None = None, conllu: str | None = None,
            trajectory: GestureTrajectory | None = None, click=None,
            no_gesture: bool = False, trace: bool = False,
            detection: DetectionParams = DetectionParams(),
            click_bandwidth: float = DEFAULT_CLICK_BANDWIDTH) -> dict:
    """One scene + instruction (+ pointing) through the full pipeline.

    Returns prediction (object id), final_p aligned with object order, the
    program that was executed, the pointing scores used, and optionally a
    per-step trace of the state machine.
    """
    if params.dim != embedder.dim:
        raise ValueError(
            f"params dimension {params.dim} does not match embedding dimension "
            f"{embedder.dim}")
    steps = program_for(instruction=instruction, conllu=conllu,
                        lexicon=lexicon, embedder=embedder)
    pointing = pointing_for(scene, trajectory=trajectory, click=click,
                            no_gesture=no_gesture, detection=detection,
                            click_bandwidth=click_bandwidth)
    graph = build_scene_graph(scene, lexicon, pointing)
    arrays = embed_graph(graph, embedder)
    steps_r, steps_R = embed_program(steps, embedder)
    final_p, tapes = run_program(params, arrays, steps_r, steps_R)
    prediction = arrays.node_ids[int(np.argmax(final_p))]
    out = {
        "prediction": prediction,
        "final_p": [float(x) for x in final_p],
        "object_ids": list(arrays.node_ids),
        "program": {"steps": [step_to_dict(s) for s in steps]},
        "pointing": None if pointing is None else pointing.to_dict(),
        "initial_p": [float(x) for x in uniform_attention(arrays.num_nodes)],
    }
    if trace:
        out["trace"] = _trace_entries(steps, tapes, final_p)
    return out
