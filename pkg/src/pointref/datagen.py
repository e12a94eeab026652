"""Seeded synthetic data: scenes, instructions, pointing, and gold labels.

Episodes come in four instruction shapes:

- T1 "pick up the {color} {name}" and T2 "pick up the {size} {color} {name}"
  are attribute-only; the gold object is the unique attribute match.
- T3 "pick up this {name}" is ambiguous from text alone (two extra objects
  share the name) and ships a synthetic pointing trajectory aimed at the gold
  object.
- T4 "pick up the {name} {relword} this {name2}" needs a relational hop: the
  trajectory points at the anchor object, not at the gold target. Two decoy
  (anchor, target) pairs with the same geometric offset make the text alone
  ambiguous, so resolving the episode requires both the gesture and the hop.

Every episode is checked during generation against a brute-force symbolic
filter: the gold object must be the unique satisfier of the full multimodal
constraint set. Episode randomness is seeded per global index, so growing or
shrinking one split never changes the others.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .gesture import GestureTrajectory, trajectory_from_dict, trajectory_to_dict
from .scene import (
    DEFAULT_NEAR_THRESHOLD,
    Scene,
    SceneObject,
    UserPose,
    classify_relation,
    scene_from_dict,
    scene_to_dict,
)
from .vocab import (
    DEFAULT_LEXICON,
    GENERALIZATION_NAMES,
    Lexicon,
    lexicon_from_dict,
    lexicon_to_dict,
)

TEMPLATES = ("T1", "T2", "T3", "T4")

# Surface realizations per canonical relation; all of them parse back to the
# canonical form through the relation synonym map.
RELATION_SURFACES: dict[str, tuple[str, ...]] = {
    "near": ("beside", "near", "by", "next to"),
    "left": ("to the left of", "left of"),
    "right": ("to the right of", "right of"),
    "front": ("in front of",),
    "back": ("behind",),
}

# Decoy structure shared by the demonstrative templates: the text alone
# always leaves three candidates, and only the gesture disambiguates.
NUM_DECOYS = 2
DECOY_MIN_DISTANCE = 1.0  # m between the aimed-at object and its look-alikes

NEAR_OFFSET_RANGE = (0.32, 0.48)        # inside the near threshold, outside min separation
DIRECTIONAL_OFFSET_RANGE = (0.6, 1.2)   # clearly outside the near threshold
DIRECTIONAL_CONE_DEG = 30.0             # offset direction stays within the relation's quadrant

MAX_PLACEMENT_ATTEMPTS = 1000

# Trajectory synthesis shape parameters.
REST_WRIST_HEIGHT = 0.8
REST_WRIST_AHEAD = 0.25
SWEEP_WOBBLE_DEG = 15.0   # cone half-angle of the sweep-phase wobble
SWEEP_WOBBLE_HZ = 1.5     # precession rate; keeps the sweep clearly unstable
ARM_MAX = 0.55
ARM_DROP_MAX = 0.38       # max vertical head-to-wrist drop, keeps the wrist raised


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    train_size: int = 500
    val_size: int = 100
    generalization_size: int = 0
    count_min: int = 3
    count_max: int = 6
    arena_size: float = 4.0          # square side, meters
    arena_center_ahead: float = 2.0  # arena center this far in front of the user
    min_separation: float = 0.3
    noise_deg: float = 2.0           # per-sample angular noise while dwelling
    dwell_fraction: float = 0.8
    duration_s: float = 3.0
    rate_hz: float = 60.0

    def __post_init__(self):
        if self.train_size < 0 or self.val_size < 0 or self.generalization_size < 0:
            raise ValueError("split sizes must be non-negative")
        if not (2 <= self.count_min <= self.count_max):
            raise ValueError("object count range must satisfy 2 <= min <= max")
        if not 0.0 <= self.dwell_fraction <= 1.0:
            raise ValueError("dwell fraction must be in [0, 1]")
        if self.arena_size <= 0 or self.duration_s <= 0 or self.rate_hz <= 0:
            raise ValueError("arena size, duration, and rate must be positive")
        if self.noise_deg < 0:
            raise ValueError("angular noise must be non-negative")


def config_to_dict(config: GeneratorConfig) -> dict:
    return {
        "seed": config.seed,
        "train_size": config.train_size,
        "val_size": config.val_size,
        "generalization_size": config.generalization_size,
        "count_min": config.count_min,
        "count_max": config.count_max,
        "arena_size": config.arena_size,
        "arena_center_ahead": config.arena_center_ahead,
        "min_separation": config.min_separation,
        "noise_deg": config.noise_deg,
        "dwell_fraction": config.dwell_fraction,
        "duration_s": config.duration_s,
        "rate_hz": config.rate_hz,
    }


def config_from_dict(data: dict) -> GeneratorConfig:
    return GeneratorConfig(**data)


@dataclass(eq=False)
class Episode:
    scene: Scene
    instruction: str
    gold_id: str
    template: str
    slots: dict[str, str]
    trajectory: GestureTrajectory | None = None
    conllu: str | None = None


@dataclass(eq=False)
class Dataset:
    config: GeneratorConfig
    lexicon: Lexicon
    episodes: list[Episode]
    splits: dict[str, list[int]]  # split name -> indices into episodes

    def split_episodes(self, split: str) -> list[Episode]:
        if split not in self.splits:
            raise KeyError(f"unknown split '{split}'")
        return [self.episodes[i] for i in self.splits[split]]


# --- placement ---------------------------------------------------------------

def _arena_bounds(config: GeneratorConfig, user: UserPose) -> tuple[np.ndarray, float]:
    center = np.asarray(user.head[:2]) + config.arena_center_ahead * user.forward
    return center, config.arena_size / 2.0


def _in_arena(p: np.ndarray, center: np.ndarray, half: float) -> bool:
    return bool(np.all(np.abs(p - center) <= half))


def _sample_position(rng: np.random.Generator, config: GeneratorConfig,
                     center: np.ndarray, half: float,
                     placed: list[np.ndarray],
                     accept=None) -> np.ndarray:
    for _ in range(MAX_PLACEMENT_ATTEMPTS):
        p = center + rng.uniform(-half, half, size=2)
        if any(np.linalg.norm(p - q) < config.min_separation for q in placed):
            continue
        if accept is not None and not accept(p):
            continue
        return p
    raise RuntimeError("could not place an object after 1000 attempts")


@dataclass
class _Blueprint:
    """An object's attributes and position before ids are assigned."""

    name: str
    color: str
    shape: str
    size: str
    position: np.ndarray
    role: str = "filler"  # gold | anchor | decoy | decoy_target | filler


def _random_attrs(rng: np.random.Generator, lexicon: Lexicon, names_pool) -> dict:
    return {
        "name": str(rng.choice(names_pool)),
        "color": str(rng.choice(lexicon.colors)),
        "shape": str(rng.choice(lexicon.shapes)),
        "size": str(rng.choice(lexicon.sizes)),
    }


def _finish_scene(rng: np.random.Generator, blueprints: list[_Blueprint],
                  user: UserPose) -> tuple[Scene, dict[str, str]]:
    """Shuffle the blueprints and assign ids, so the gold id is uniform."""
    order = rng.permutation(len(blueprints))
    objects = []
    role_ids: dict[str, str] = {}
    for k, idx in enumerate(order):
        blueprint = blueprints[int(idx)]
        oid = f"obj{k}"
        objects.append(SceneObject(
            id=oid, name=blueprint.name, color=blueprint.color, shape=blueprint.shape,
            size=blueprint.size, position=(float(blueprint.position[0]), float(blueprint.position[1]), 0.0)))
        if blueprint.role != "filler" and blueprint.role not in role_ids:
            role_ids[blueprint.role] = oid
    return Scene(objects=objects, user=user), role_ids


def generate_scene(rng: np.random.Generator, config: GeneratorConfig,
                   lexicon: Lexicon, names_pool=None,
                   user: UserPose = UserPose()) -> Scene:
    """A plain random scene: uniform attributes, non-overlapping positions."""
    names_pool = list(names_pool if names_pool is not None else lexicon.names)
    center, half = _arena_bounds(config, user)
    n = int(rng.integers(config.count_min, config.count_max + 1))
    placed: list[np.ndarray] = []
    blueprints = []
    for _ in range(n):
        p = _sample_position(rng, config, center, half, placed)
        placed.append(p)
        blueprints.append(_Blueprint(position=p, **_random_attrs(rng, lexicon, names_pool)))
    scene, _ = _finish_scene(rng, blueprints, user)
    return scene


# --- the symbolic filter oracle ---------------------------------------------

def text_candidates(scene: Scene, slots: dict[str, str],
                    near_threshold: float = DEFAULT_NEAR_THRESHOLD) -> list[str]:
    """Objects consistent with the instruction text alone (no gesture).

    Brute force: apply the template's attribute equalities; for the
    relational template, keep targets that stand in the stated relation to
    ANY object with the anchor's name.
    """
    objs = scene.objects
    matches = [o for o in objs
               if all(getattr(o, k) == v for k, v in slots.items()
                      if k in ("name", "color", "size"))]
    rel = slots.get("relation")
    if rel is None:
        return [o.id for o in matches]
    anchors = [o for o in objs if o.name == slots["anchor_name"]]
    out = []
    for cand in matches:
        for anchor in anchors:
            if anchor.id == cand.id:
                continue
            if classify_relation(np.asarray(anchor.position[:2]),
                                 np.asarray(cand.position[:2]),
                                 scene.user, near_threshold) == rel:
                out.append(cand.id)
                break
    return out


def full_candidates(scene: Scene, slots: dict[str, str], aim: np.ndarray | None,
                    near_threshold: float = DEFAULT_NEAR_THRESHOLD) -> list[str]:
    """Objects consistent with text plus an idealized gesture at `aim`.

    The gesture resolves a demonstrative by nearest ground distance to the
    aimed point: for T3 it picks among the text candidates directly; for T4
    it picks the pointed anchor among the anchor-name objects and then keeps
    targets standing in the stated relation to that anchor alone.
    """
    if aim is None or "demonstrative" not in slots:
        return text_candidates(scene, slots, near_threshold)
    aim = np.asarray(aim, dtype=float)

    def closest(ids: list[str]) -> list[str]:
        if not ids:
            return []
        dists = {oid: float(np.linalg.norm(
            np.asarray(scene.objects[scene.index_of(oid)].position[:2]) - aim))
            for oid in ids}
        best = min(dists.values())
        return [oid for oid, v in dists.items() if v == best]

    rel = slots.get("relation")
    if rel is None:
        return closest(text_candidates(scene, slots, near_threshold))
    anchor_ids = [o.id for o in scene.objects if o.name == slots["anchor_name"]]
    pointed = closest(anchor_ids)
    if len(pointed) != 1:
        return []
    anchor = scene.objects[scene.index_of(pointed[0])]
    out = []
    for o in scene.objects:
        if o.id != anchor.id and o.name == slots["name"]:
            if classify_relation(np.asarray(anchor.position[:2]),
                                 np.asarray(o.position[:2]),
                                 scene.user, near_threshold) == rel:
                out.append(o.id)
    return out


# --- trajectory synthesis ----------------------------------------------------

def _tangent_basis(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.array([0.0, 0.0, 1.0])
    if abs(float(d @ helper)) > 0.99:
        helper = np.array([1.0, 0.0, 0.0])
    u = np.cross(d, helper)
    u /= np.linalg.norm(u)
    return u, np.cross(d, u)


def _rotate_toward(d: np.ndarray, angle: float, azimuth: float) -> np.ndarray:
    u, v = _tangent_basis(d)
    tangent = np.cos(azimuth) * u + np.sin(azimuth) * v
    return np.cos(angle) * d + np.sin(angle) * tangent


def synthesize_pointing(anchor, config: GeneratorConfig, rng: np.random.Generator,
                        user: UserPose = UserPose()) -> GestureTrajectory:
    """A plausible pointing recording aimed at a ground point.

    The first (1 − dwell) fraction sweeps the wrist up from a rest pose
    (hanging at 0.8 m) toward the target ray while the ray direction wobbles
    on a precessing cone — deliberate motion the segment detector must
    reject. The remaining dwell fraction holds the head→wrist ray on the
    anchor with small per-sample angular noise; the arm length is chosen so
    the wrist stays clearly raised (≥ 1.22 m) the whole time.
    """
    anchor = np.asarray(anchor, dtype=float).reshape(2)
    head = np.asarray(user.head, dtype=float)
    ahead = float((anchor - head[:2]) @ user.forward)
    if ahead <= 0:
        raise ValueError("anchor is behind the user; cannot synthesize pointing")

    aim_dir = np.concatenate([anchor, [0.0]]) - head
    aim_dir /= np.linalg.norm(aim_dir)
    arm = min(ARM_MAX, ARM_DROP_MAX / max(abs(float(aim_dir[2])), 1e-9))
    dwell_wrist = head + arm * aim_dir
    rest_wrist = np.concatenate([head[:2] + REST_WRIST_AHEAD * user.forward,
                                 [REST_WRIST_HEIGHT]])

    n = int(round(config.duration_s * config.rate_hz))
    times = np.arange(n) / config.rate_hz
    sweep_end = (1.0 - config.dwell_fraction) * config.duration_s
    wobble = np.deg2rad(SWEEP_WOBBLE_DEG)
    omega = 2.0 * np.pi * SWEEP_WOBBLE_HZ
    phase = float(rng.uniform(0.0, 2.0 * np.pi))
    sigma = np.deg2rad(config.noise_deg)

    wrists = np.empty((n, 3))
    for k, t in enumerate(times):
        if t < sweep_end:
            s = t / sweep_end
            base = (1.0 - s) * rest_wrist + s * dwell_wrist
            radius = float(np.linalg.norm(base - head))
            d = (base - head) / radius
            d = _rotate_toward(d, wobble, omega * t + phase)
            wrists[k] = head + radius * d
        else:
            angle = float(rng.normal(0.0, sigma)) if sigma > 0 else 0.0
            azimuth = float(rng.uniform(0.0, 2.0 * np.pi))
            d = _rotate_toward(aim_dir, angle, azimuth) if angle != 0.0 else aim_dir
            arm_k = min(ARM_MAX, ARM_DROP_MAX / max(abs(float(d[2])), 1e-9))
            wrists[k] = head + arm_k * d
    return GestureTrajectory(times=times, head=np.tile(head, (n, 1)),
                             hands={"right": wrists}, rate_hz=config.rate_hz)


# --- per-template episode builders --------------------------------------------

def _build_t1(rng, config, lexicon, names_pool, center, half, user):
    n = int(rng.integers(config.count_min, config.count_max + 1))
    attrs = _random_attrs(rng, lexicon, names_pool)
    placed: list[np.ndarray] = []
    blueprints: list[_Blueprint] = []
    gold_pos = _sample_position(rng, config, center, half, placed)
    placed.append(gold_pos)
    blueprints.append(_Blueprint(position=gold_pos, role="gold", **attrs))
    for _ in range(n - 1):
        while True:
            other = _random_attrs(rng, lexicon, names_pool)
            if not (other["name"] == attrs["name"] and other["color"] == attrs["color"]):
                break
        p = _sample_position(rng, config, center, half, placed)
        placed.append(p)
        blueprints.append(_Blueprint(position=p, **other))
    slots = {"name": attrs["name"], "color": attrs["color"]}
    instruction = f"pick up the {attrs['color']} {attrs['name']}"
    return blueprints, slots, instruction, None


def _build_t2(rng, config, lexicon, names_pool, center, half, user):
    n = int(rng.integers(max(config.count_min, 2), config.count_max + 1))
    attrs = _random_attrs(rng, lexicon, names_pool)
    placed: list[np.ndarray] = []
    blueprints: list[_Blueprint] = []
    gold_pos = _sample_position(rng, config, center, half, placed)
    placed.append(gold_pos)
    blueprints.append(_Blueprint(position=gold_pos, role="gold", **attrs))
    # One look-alike that only the size distinguishes, so the full template
    # is actually needed.
    other_sizes = [s for s in lexicon.sizes if s != attrs["size"]]
    twin = dict(attrs, size=str(rng.choice(other_sizes)))
    p = _sample_position(rng, config, center, half, placed)
    placed.append(p)
    blueprints.append(_Blueprint(position=p, **twin))
    for _ in range(n - 2):
        while True:
            other = _random_attrs(rng, lexicon, names_pool)
            if not (other["name"] == attrs["name"] and other["color"] == attrs["color"]
                    and other["size"] == attrs["size"]):
                break
        p = _sample_position(rng, config, center, half, placed)
        placed.append(p)
        blueprints.append(_Blueprint(position=p, **other))
    slots = {"name": attrs["name"], "color": attrs["color"], "size": attrs["size"]}
    instruction = f"pick up the {attrs['size']} {attrs['color']} {attrs['name']}"
    return blueprints, slots, instruction, None


def _build_t3(rng, config, lexicon, names_pool, center, half, user):
    n = max(int(rng.integers(config.count_min, config.count_max + 1)),
            1 + NUM_DECOYS)
    attrs = _random_attrs(rng, lexicon, names_pool)
    placed: list[np.ndarray] = []
    blueprints: list[_Blueprint] = []
    gold_pos = _sample_position(rng, config, center, half, placed)
    placed.append(gold_pos)
    blueprints.append(_Blueprint(position=gold_pos, role="gold", **attrs))
    for _ in range(NUM_DECOYS):
        decoy = dict(_random_attrs(rng, lexicon, names_pool), name=attrs["name"])
        p = _sample_position(
            rng, config, center, half, placed,
            accept=lambda q: np.linalg.norm(q - gold_pos) >= DECOY_MIN_DISTANCE)
        placed.append(p)
        blueprints.append(_Blueprint(position=p, role="decoy", **decoy))
    filler_names = [m for m in names_pool if m != attrs["name"]]
    for _ in range(n - 1 - NUM_DECOYS):
        p = _sample_position(rng, config, center, half, placed)
        placed.append(p)
        blueprints.append(_Blueprint(position=p, **_random_attrs(rng, lexicon, filler_names)))
    slots = {"name": attrs["name"], "demonstrative": "this"}
    instruction = f"pick up this {attrs['name']}"
    return blueprints, slots, instruction, gold_pos


def _relation_offset(rng: np.random.Generator, rel: str, user: UserPose) -> np.ndarray:
    """A displacement that classify_relation maps back to `rel`."""
    if rel == "near":
        radius = float(rng.uniform(*NEAR_OFFSET_RANGE))
        theta = float(rng.uniform(0.0, 2.0 * np.pi))
        return radius * np.array([np.cos(theta), np.sin(theta)])
    axis = {
        "right": user.right,
        "left": -user.right,
        "back": user.forward,
        "front": -user.forward,
    }[rel]
    radius = float(rng.uniform(*DIRECTIONAL_OFFSET_RANGE))
    spread = np.deg2rad(DIRECTIONAL_CONE_DEG)
    theta = float(rng.uniform(-spread, spread))
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    return radius * (rot @ np.asarray(axis))


def _build_t4(rng, config, lexicon, names_pool, center, half, user):
    if len(names_pool) < 2:
        raise ValueError("relational template needs at least two names")
    name2 = str(rng.choice(names_pool))
    name = str(rng.choice([m for m in names_pool if m != name2]))
    rel = str(rng.choice(list(RELATION_SURFACES)))
    surface = str(rng.choice(RELATION_SURFACES[rel]))
    offset = _relation_offset(rng, rel, user)

    near_t = DEFAULT_NEAR_THRESHOLD
    for _ in range(MAX_PLACEMENT_ATTEMPTS):
        placed: list[np.ndarray] = []
        blueprints: list[_Blueprint] = []
        try:
            anchor_pos = _sample_position(
                rng, config, center, half, placed,
                accept=lambda q: _in_arena(q + offset, center, half))
            placed.append(anchor_pos)
            target_pos = anchor_pos + offset
            placed.append(target_pos)
            anchor_positions = [anchor_pos]
            for _ in range(NUM_DECOYS):
                def ok(q, _aps=tuple(map(tuple, anchor_positions))):
                    if not _in_arena(q + offset, center, half):
                        return False
                    if any(np.linalg.norm(q - np.asarray(ap)) < DECOY_MIN_DISTANCE
                           for ap in _aps):
                        return False
                    tgt = q + offset
                    if any(np.linalg.norm(tgt - p) < config.min_separation
                           for p in placed):
                        return False
                    # The decoy target must not also stand in the stated
                    # relation to the true anchor, or gold stops being unique.
                    return classify_relation(anchor_pos, tgt, user, near_t) != rel
                q = _sample_position(rng, config, center, half, placed, accept=ok)
                placed.append(q)
                placed.append(q + offset)
                anchor_positions.append(q)
        except RuntimeError:
            continue
        gold_attrs = _random_attrs(rng, lexicon, names_pool)
        anchor_attrs = _random_attrs(rng, lexicon, names_pool)
        blueprints.append(_Blueprint(position=anchor_positions[0], role="anchor",
                           **dict(anchor_attrs, name=name2)))
        blueprints.append(_Blueprint(position=anchor_positions[0] + offset, role="gold",
                           **dict(gold_attrs, name=name)))
        for ap in anchor_positions[1:]:
            blueprints.append(_Blueprint(position=ap, role="decoy",
                               **dict(_random_attrs(rng, lexicon, names_pool), name=name2)))
            blueprints.append(_Blueprint(position=ap + offset, role="decoy_target",
                               **dict(_random_attrs(rng, lexicon, names_pool), name=name)))
        slots = {"name": name, "relation": rel, "anchor_name": name2,
                 "demonstrative": "this"}
        instruction = f"pick up the {name} {surface} this {name2}"
        return blueprints, slots, instruction, anchor_positions[0]
    raise RuntimeError("could not lay out a relational episode after 1000 attempts")


_BUILDERS = {"T1": _build_t1, "T2": _build_t2, "T3": _build_t3, "T4": _build_t4}


def generate_episode(rng: np.random.Generator, config: GeneratorConfig,
                     lexicon: Lexicon, names_pool=None,
                     user: UserPose = UserPose(),
                     template: str | None = None) -> Episode:
    """One fully-checked episode; the gold object uniquely satisfies the
    instruction (plus gesture, for the demonstrative templates)."""
    names_pool = list(names_pool if names_pool is not None else lexicon.names)
    center, half = _arena_bounds(config, user)
    for _ in range(MAX_PLACEMENT_ATTEMPTS):
        tpl = template or TEMPLATES[int(rng.integers(len(TEMPLATES)))]
        blueprints, slots, instruction, aim = _BUILDERS[tpl](
            rng, config, lexicon, names_pool, center, half, user)
        scene, role_ids = _finish_scene(rng, blueprints, user)
        gold_id = role_ids["gold"]
        sat = full_candidates(scene, slots, aim)
        if sat != [gold_id]:
            continue  # decoys interacted badly; retry with a fresh layout
        trajectory = None
        if aim is not None:
            trajectory = synthesize_pointing(aim, config, rng, user)
        return Episode(scene=scene, instruction=instruction, gold_id=gold_id,
                       template=tpl, slots=slots, trajectory=trajectory)
    raise RuntimeError("could not generate a unique episode after 1000 attempts")


def combined_lexicon(lexicon: Lexicon = DEFAULT_LEXICON,
                     extra_names=GENERALIZATION_NAMES) -> Lexicon:
    """The dataset lexicon: base names plus the held-out generalization names,
    so graphs from every split share one attribute vocabulary."""
    names = tuple(lexicon.names) + tuple(m for m in extra_names
                                         if m not in lexicon.names)
    return lexicon.with_names(names)


def generate_dataset(config: GeneratorConfig,
                     lexicon: Lexicon = DEFAULT_LEXICON,
                     user: UserPose = UserPose()) -> Dataset:
    """All splits of a dataset, episode i seeded by (config.seed, i).

    Train and val draw object names from the base lexicon; the optional
    generalization split draws from a disjoint name pool. Per-index seeding
    keeps earlier splits byte-identical when later ones grow.
    """
    full = combined_lexicon(lexicon)
    gen_pool = [m for m in full.names if m not in lexicon.names]
    if config.generalization_size > 0 and not gen_pool:
        raise ValueError("no held-out names available for the generalization split")
    plan = [("train", config.train_size, list(lexicon.names)),
            ("val", config.val_size, list(lexicon.names)),
            ("generalization", config.generalization_size, gen_pool)]
    episodes: list[Episode] = []
    splits: dict[str, list[int]] = {}
    index = 0
    for split, size, pool in plan:
        ids = []
        for _ in range(size):
            rng = np.random.default_rng([config.seed, index])
            episodes.append(generate_episode(rng, config, full, pool, user))
            ids.append(index)
            index += 1
        splits[split] = ids
    return Dataset(config=config, lexicon=full, episodes=episodes, splits=splits)


# --- disk layout ---------------------------------------------------------------

def episode_to_dict(ep: Episode) -> dict:
    return {
        "scene": scene_to_dict(ep.scene),
        "instruction": ep.instruction,
        "conllu": ep.conllu,
        "trajectory": None if ep.trajectory is None else trajectory_to_dict(ep.trajectory),
        "gold_id": ep.gold_id,
        "template": ep.template,
        "slots": dict(ep.slots),
    }


def episode_from_dict(data: dict) -> Episode:
    return Episode(
        scene=scene_from_dict(data["scene"]),
        instruction=data["instruction"],
        conllu=data.get("conllu"),
        trajectory=(None if data.get("trajectory") is None
                    else trajectory_from_dict(data["trajectory"])),
        gold_id=data["gold_id"],
        template=data.get("template", ""),
        slots=dict(data.get("slots", {})),
    )


def write_dataset(dataset: Dataset, root) -> None:
    root = Path(root)
    episodes_dir = root / "episodes"
    episodes_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "config": config_to_dict(dataset.config),
        "lexicon": lexicon_to_dict(dataset.lexicon),
        "splits": {k: list(v) for k, v in dataset.splits.items()},
    }
    (root / "manifest.json").write_text(json.dumps(manifest, indent=1),
                                        encoding="utf-8")
    for i, ep in enumerate(dataset.episodes):
        path = episodes_dir / f"{i:04d}.json"
        path.write_text(json.dumps(episode_to_dict(ep)), encoding="utf-8")


def read_dataset(root) -> Dataset:
    root = Path(root)
    manifest_path = root / "manifest.json"
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise FileNotFoundError(f"{manifest_path}: no dataset manifest") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"{manifest_path}: malformed manifest ({exc})") from None
    config = config_from_dict(manifest["config"])
    lexicon = lexicon_from_dict(manifest["lexicon"])
    splits = {k: [int(i) for i in v] for k, v in manifest["splits"].items()}
    count = 1 + max((max(v) for v in splits.values() if v), default=-1)
    episodes = []
    for i in range(count):
        path = root / "episodes" / f"{i:04d}.json"
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise FileNotFoundError(f"{path}: missing episode file") from None
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: malformed episode ({exc})") from None
        episodes.append(episode_from_dict(data))
    return Dataset(config=config, lexicon=lexicon, episodes=episodes, splits=splits)
