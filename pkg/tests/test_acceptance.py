"""Shipping criteria.

One test per criterion; each prints a single PASS/FAIL line straight to the
terminal (bypassing capture) so a full run doubles as a release checklist.
The expensive end-to-end benchmark — generate 500/100/100 episodes, train 30
epochs — runs once in a module fixture and feeds criteria 1, 2, 3, and 7.

Tolerances are pinned in the assertions below and nowhere else.
"""

from __future__ import annotations

import itertools
import json
import tempfile
import time

import numpy as np
import pytest
from conftest import random_episode
from test_instruction import FLAGSHIP_SENTENCE, GOLDEN_PROGRAMS

from pointref.cli import main
from pointref.datagen import (
    GeneratorConfig,
    episode_to_dict,
    generate_dataset,
    read_dataset,
    synthesize_pointing,
    write_dataset,
)
from pointref.embeddings import EmbeddingProvider, onehot_embeddings
from pointref.gesture import estimate_pointing, ray_ground_intersection
from pointref.instruction import StepType
from pointref.pipeline import compile_split, make_embedder, program_for
from pointref.reasoner import (
    GraphArrays,
    embed_graph,
    episode_loss,
    episode_loss_and_grad,
    fit,
    init_params,
    load_params,
    random_params,
    run_program,
)
from pointref.scene import (
    INVERSE_RELATION,
    Scene,
    SceneObject,
    UserPose,
    build_scene_graph,
    classify_relation,
)
from pointref.vocab import DEFAULT_LEXICON


def report(capsys, number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} — {detail}"
    with capsys.disabled():
        print(line)
    assert ok, line


@pytest.fixture(scope="module")
def benchmark(tmp_path_factory):
    """Generate the benchmark dataset and train on it, via the real CLI."""
    root = tmp_path_factory.mktemp("acceptance")
    data = root / "data"
    params = root / "params.json"
    t0 = time.monotonic()
    assert main(["gen", "--out", str(data), "--train", "500", "--val", "100",
                 "--generalization", "100", "--seed", "42"]) == 0
    assert main(["train", "--data", str(data), "--out", str(params),
                 "--epochs", "30", "--lr", "0.05", "--seed", "7"]) == 0
    return {"data": data, "params": params,
            "gen_train_seconds": time.monotonic() - t0}


def cli_eval(benchmark, capsys, *flags) -> dict:
    capsys.readouterr()  # drop anything earlier calls printed
    code = main(["eval", "--data", str(benchmark["data"]),
                 "--params", str(benchmark["params"]), *flags])
    out = capsys.readouterr().out
    assert code == 0, f"eval {flags} exited {code}"
    return json.loads(out.strip().splitlines()[-1])


def test_criterion_1_synthetic_benchmark(benchmark, capsys):
    t0 = time.monotonic()
    result = cli_eval(benchmark, capsys, "--split", "val")
    wall = benchmark["gen_train_seconds"] + (time.monotonic() - t0)
    ok = result["accuracy"] >= 0.90 and result["n"] == 100 and wall <= 300.0
    report(capsys, 1, ok,
           f"val accuracy {result['accuracy']:.3f} on n={result['n']} "
           f"(threshold 0.90); gen+train+eval wall time {wall:.1f}s (limit 300s)")


def test_criterion_2_no_gesture_ablation(benchmark, capsys):
    full = cli_eval(benchmark, capsys, "--split", "val", "--demonstrative-only")
    blind = cli_eval(benchmark, capsys, "--split", "val", "--demonstrative-only",
                     "--no-gesture")
    drop = full["accuracy"] - blind["accuracy"]
    ok = (full["n"] == blind["n"] > 0
          and drop >= 0.35
          and blind["accuracy"] <= 0.45)
    report(capsys, 2, ok,
           f"deictic-subset accuracy {full['accuracy']:.3f} with gesture vs "
           f"{blind['accuracy']:.3f} without (n={full['n']}); drop {drop:.3f} "
           f"(needs ≥ 0.35) and blind ≤ 0.45")


def test_criterion_3_generalization_gap(benchmark, capsys):
    val = cli_eval(benchmark, capsys, "--split", "val")
    gen = cli_eval(benchmark, capsys, "--split", "generalization")
    gap = val["accuracy"] - gen["accuracy"]
    ok = gen["n"] == 100 and gap <= 0.15
    report(capsys, 3, ok,
           f"val {val['accuracy']:.3f} vs held-out-name split "
           f"{gen['accuracy']:.3f} (n={gen['n']}); gap {gap:.3f} (limit 0.15)")


def test_criterion_4_gradient_check(capsys):
    delta = 1e-4
    worst = 0.0
    checked = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        ep = random_episode(rng, dim=8)
        params = random_params(8, seed=seed)
        _, grads = episode_loss_and_grad(params, ep)
        for key, mat in params.W.items():
            for idx in np.ndindex(mat.shape):
                g = grads[key][idx]
                if abs(g) <= 1e-8:
                    continue
                orig = mat[idx]
                mat[idx] = orig + delta
                hi = episode_loss(params, ep)
                mat[idx] = orig - delta
                lo = episode_loss(params, ep)
                mat[idx] = orig
                fd = (hi - lo) / (2.0 * delta)
                worst = max(worst, abs(g - fd) / max(abs(g), abs(fd)))
                checked += 1
    ok = checked > 1000 and worst <= 1e-3
    report(capsys, 4, ok,
           f"analytic vs central differences on 20 seeded dim-8 fixtures: "
           f"max relative error {worst:.2e} over {checked} entries (limit 1e-3)")


def test_criterion_5_pointing_recovery(capsys):
    config = GeneratorConfig(dwell_fraction=0.8, noise_deg=2.0)
    user = UserPose()
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(1000 + seed)
        anchor = rng.uniform((1.5, -1.2), (3.5, 1.2))
        positions = [anchor]
        while len(positions) < 4:
            cand = rng.uniform((1.0, -1.8), (4.0, 1.8))
            if all(np.linalg.norm(cand - p) >= 0.8 for p in positions):
                positions.append(cand)
        objects = tuple(
            SceneObject(id=("anchor" if i == 0 else f"d{i}"),
                        position=(p[0], p[1], 0.0), name="cube", color="red",
                        shape="round", size="small")
            for i, p in enumerate(positions))
        scene = Scene(objects=objects, user=user)
        est = estimate_pointing(synthesize_pointing(anchor, config, rng, user),
                                scene)
        top = est.object_ids[int(np.argmax(est.scores))]
        if (est.detected and est.target is not None
                and np.linalg.norm(est.target - anchor) <= 0.25
                and top == "anchor"):
            hits += 1

    exact = True
    for head, wrist in [((0.0, 0.0, 1.6), (0.3, 0.0, 1.28)),
                        ((1.0, 2.0, 2.0), (1.5, 2.5, 1.0)),
                        ((-1.0, 0.5, 1.5), (-0.5, 0.25, 1.2))]:
        head = np.asarray(head)
        wrist = np.asarray(wrist)
        t = head[2] / (head[2] - wrist[2])
        expected = head[:2] + t * (wrist[:2] - head[:2])
        got = ray_ground_intersection(head, wrist)
        exact = exact and np.array_equal(got, expected)

    ok = hits >= 95 and exact
    report(capsys, 5, ok,
           f"synthetic gestures recovered the anchor (≤ 0.25 m, top-scored) in "
           f"{hits}/100 cases (needs ≥ 95); ray–ground closed form exact: {exact}")


def test_criterion_6_golden_programs(capsys):
    failures = []
    max_sum_err = 0.0
    for sentence, expected in GOLDEN_PROGRAMS:
        steps = program_for(instruction=sentence, lexicon=DEFAULT_LEXICON)
        got = [(s.kind, s.token) for s in steps]
        if got != expected:
            failures.append(sentence)
        for s in steps:
            max_sum_err = max(max_sum_err, abs(float(np.sum(s.relevance)) - 1.0))
    ok = (len(GOLDEN_PROGRAMS) == 20
          and FLAGSHIP_SENTENCE in [s for s, _ in GOLDEN_PROGRAMS]
          and not failures
          and max_sum_err <= 1e-9)
    report(capsys, 6, ok,
           f"{len(GOLDEN_PROGRAMS) - len(failures)}/{len(GOLDEN_PROGRAMS)} golden "
           f"programs exact (flagship included); worst type-distribution sum "
           f"error {max_sum_err:.1e} (limit 1e-9)"
           + (f"; failed: {failures}" if failures else ""))


def test_criterion_7_symbolic_oracle_equivalence(benchmark, capsys):
    params = load_params(benchmark["params"])
    embedder = make_embedder("hash", dim=params.dim)
    lexicon = DEFAULT_LEXICON
    names = ("cube", "ball", "tool")
    colors = ("red", "blue", "black")
    combos = [(n, c) for n in names for c in colors]

    def run(arrays, instruction):
        steps = program_for(instruction=instruction, lexicon=lexicon,
                            embedder=embedder)
        r = embedder.embed_all([s.token for s in steps])
        R = np.array([s.relevance for s in steps])
        p, _ = run_program(params, arrays, r, R)
        return int(np.argmax(p))

    total = agree = 0
    for k in (2, 3, 4):
        for subset in itertools.combinations(combos, k):
            objects = tuple(
                SceneObject(id=f"obj{i}", position=(1.0 + 0.7 * i, 0.9 * (i % 2), 0.0),
                            name=n, color=c, shape="round", size="small")
                for i, (n, c) in enumerate(subset))
            scene = Scene(objects=objects, user=UserPose())
            graph = build_scene_graph(scene, lexicon, None, alpha=0.0)
            arrays = embed_graph(graph, embedder)
            scene_names = [n for n, _ in subset]
            scene_colors = [c for _, c in subset]
            for i, (n, c) in enumerate(subset):
                queries = [f"pick up the {c} {n}"]
                if scene_names.count(n) == 1:
                    queries.append(f"pick up the {n}")
                if i == 0:
                    queries.append(f"pick up the small {c} {n}")
                for q in queries:
                    total += 1
                    agree += run(arrays, q) == i
    rate = agree / total
    ok = rate >= 0.99
    report(capsys, 7, ok,
           f"trained model matched the brute-force attribute filter on "
           f"{agree}/{total} unique-referent queries ({rate:.4f}, needs ≥ 0.99) "
           f"over all 2–4 object scenes from a 3×3 name/color grid")


def test_criterion_8_invariant_suite(capsys):
    checks: dict[str, bool] = {}
    rng = np.random.default_rng(8)

    # Every distribution the machine touches stays normalized.
    normalized = True
    for _ in range(10):
        ep = random_episode(rng, dim=8, num_nodes=4, num_steps=4)
        params = random_params(8, seed=int(rng.integers(1 << 16)))
        p, tapes = run_program(params, ep.graph, ep.steps_r, ep.steps_R)
        arrays = [p] + [t[key] for t in tapes for key in ("p", "ps", "pr")]
        normalized &= all(abs(float(np.sum(a)) - 1.0) <= 1e-9 and np.all(a >= 0)
                          for a in arrays)
    checks["normalization"] = normalized

    # Pure node / pure relation steps reproduce one branch bit-exactly.
    ep = random_episode(np.random.default_rng(3), dim=8)
    params = random_params(8, seed=3)
    for name, row, key in [("node-step endpoint", np.eye(6)[0], "ps"),
                           ("relation-step endpoint", np.eye(6)[StepType.RELATION],
                            "pr")]:
        R = np.tile(row, (ep.steps_r.shape[0], 1))
        p, tapes = run_program(params, ep.graph, ep.steps_r, R)
        checks[name] = np.array_equal(p, tapes[-1][key])

    # Relabeling the objects relabels the answer and changes nothing else.
    ep = random_episode(np.random.default_rng(4), dim=8, num_nodes=5)
    params = random_params(8, seed=4)
    base, _ = run_program(params, ep.graph, ep.steps_r, ep.steps_R)
    perm = np.random.default_rng(5).permutation(5)
    inv = np.empty(5, dtype=int)
    inv[perm] = np.arange(5)
    permuted = GraphArrays(
        S={k: v[perm] for k, v in ep.graph.S.items()},
        edge_src=inv[ep.graph.edge_src], edge_dst=inv[ep.graph.edge_dst],
        E=ep.graph.E, node_ids=tuple(ep.graph.node_ids[j] for j in perm))
    shuffled, _ = run_program(params, permuted, ep.steps_r, ep.steps_R)
    checks["permutation equivariance"] = np.allclose(shuffled, base[perm],
                                                     atol=1e-12)

    # Swapping the two objects inverts the spatial relation.
    user = UserPose()
    anti = True
    grid = [x * 0.7 for x in range(-3, 4)]
    origin = np.zeros(2)
    for dx, dy in itertools.product(grid, grid):
        if dx == dy == 0.0:
            continue
        d = np.array([dx, dy])
        anti &= classify_relation(d, origin, user) == INVERSE_RELATION[
            classify_relation(origin, d, user)]
    checks["relation antisymmetry"] = anti

    # A dataset survives the disk unchanged, and seeds pin everything down.
    config = GeneratorConfig(seed=17, train_size=3, val_size=2,
                             generalization_size=2)
    ds1 = generate_dataset(config)
    ds2 = generate_dataset(config)
    checks["seed determinism (generation)"] = all(
        episode_to_dict(a) == episode_to_dict(b)
        for a, b in zip(ds1.episodes, ds2.episodes))
    with tempfile.TemporaryDirectory() as tmp:
        write_dataset(ds1, tmp)
        back = read_dataset(tmp)
    checks["dataset round-trip identity"] = (
        len(back.episodes) == len(ds1.episodes)
        and all(episode_to_dict(a) == episode_to_dict(b)
                for a, b in zip(ds1.episodes, back.episodes))
        and back.splits == ds1.splits)

    embedder = make_embedder("hash", dim=16)
    episodes = compile_split(ds1, "train", embedder)
    histories = []
    finals = []
    for _ in range(2):
        params = init_params(16, seed=0)
        histories.append(fit(params, episodes, epochs=2, lr=0.05,
                             batch_size=1, seed=0))
        finals.append(params)
    checks["seed determinism (training)"] = histories[0] == histories[1] and all(
        np.array_equal(finals[0].W[k], finals[1].W[k]) for k in finals[0].W)

    failed = [name for name, passed in checks.items() if not passed]
    ok = not failed
    report(capsys, 8, ok,
           f"{len(checks) - len(failed)}/{len(checks)} invariants hold "
           f"(normalization, update-rule endpoints, permutation equivariance, "
           f"relation antisymmetry, disk round-trip, seed determinism)"
           + (f"; failed: {failed}" if failed else ""))


def test_criterion_9_workbench_delegated(capsys):
    with capsys.disabled():
        print("criterion 9: delegated — exercised by the workbench suite under "
              "frontend/ (vitest against recorded service fixtures)")
