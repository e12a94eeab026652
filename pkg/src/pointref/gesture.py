"""Pointing-gesture analysis.

A recorded trajectory (head and per-hand wrist positions over time) is turned
into per-object pointing scores in three stages: detect temporally stable
pointing segments (wrist raised, smoothed pointing ray turning slowly), cast
the head-through-wrist ray of every segment sample onto the ground plane, and
place a Gaussian kernel density over the hit points. Objects are scored by
the density at their ground positions, normalized to sum to one; the single
best ground point is the hit point of maximal density.

A click on a ground map goes through the same scoring path as a single-point
density with a fixed bandwidth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .scene import Scene

TWO_PI = 2.0 * np.pi
DEFAULT_CLICK_BANDWIDTH = 0.25


class GestureError(ValueError):
    """Raised for trajectories that cannot be analyzed (bad pose, shapes)."""


@dataclass(frozen=True)
class DetectionParams:
    wrist_height_min: float = 1.0          # m; wrist at or above this is "raised"
    max_ray_angular_velocity: float = 0.5  # rad/s of the smoothed pointing ray
    min_duration: float = 0.5              # s; shorter stable stretches are ignored
    smoothing_window_s: float = 0.35       # centered moving-average window for rays
    bandwidth_floor: float = 0.05          # m; lower bound on the kernel spread


@dataclass(frozen=True)
class GestureTrajectory:
    """Time-stamped head and wrist positions; wrists keyed by hand label.

    A wrist sample may be absent (all-NaN row); such samples never count as
    raised and cast no rays.
    """

    times: np.ndarray             # (n,) seconds, strictly increasing
    head: np.ndarray              # (n, 3)
    hands: dict[str, np.ndarray]  # hand -> (n, 3) wrist positions, NaN = absent
    rate_hz: float | None = None  # nominal sampling rate, informational

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        head = np.asarray(self.head, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise GestureError("trajectory needs at least one sample")
        if np.any(np.diff(times) <= 0):
            raise GestureError("timestamps must be strictly increasing")
        n = times.size
        if head.shape != (n, 3):
            raise GestureError(f"head track must have shape ({n}, 3)")
        if not np.all(np.isfinite(head)):
            raise GestureError("head track must be finite")
        hands = {}
        for hand, wrist in self.hands.items():
            wrist = np.asarray(wrist, dtype=float)
            if wrist.shape != (n, 3):
                raise GestureError(f"wrist track '{hand}' must have shape ({n}, 3)")
            hands[hand] = wrist
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "hands", hands)

    def __len__(self) -> int:
        return self.times.size


@dataclass(frozen=True)
class PointingSegment:
    hand: str
    start: int  # sample index, inclusive
    end: int    # sample index, inclusive
    start_time: float
    end_time: float


@dataclass(frozen=True)
class PointingResult:
    detected: bool
    scores: np.ndarray                 # (N,) per-object, sums to 1
    object_ids: tuple[str, ...]        # aligned with scores
    target: np.ndarray | None          # (2,) densest ground point, if any
    segments: tuple[PointingSegment, ...] = ()
    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    bandwidth: float = 0.0

    def to_dict(self) -> dict:
        return {
            "detected": self.detected,
            "scores": {oid: float(s) for oid, s in zip(self.object_ids, self.scores)},
            "target": None if self.target is None
            else {"x": float(self.target[0]), "y": float(self.target[1])},
            "bandwidth": float(self.bandwidth),
            "num_points": int(len(self.points)),
            "segments": [
                {"hand": s.hand, "start_index": s.start, "end_index": s.end,
                 "start_time": s.start_time, "end_time": s.end_time}
                for s in self.segments
            ],
        }


def ray_ground_intersection(head: np.ndarray, wrist: np.ndarray) -> np.ndarray | None:
    """Ground hit of the ray from the head through the wrist.

    The ray p(t) = head + t * (wrist - head) meets z = 0 at
    t* = head_z / (head_z - wrist_z), which lies beyond the wrist only when
    the wrist is below the head; otherwise the ray never descends and None is
    returned. A head at or below the ground is an invalid pose.
    """
    head = np.asarray(head, dtype=float)
    wrist = np.asarray(wrist, dtype=float)
    if head[2] <= 0:
        raise GestureError("head must be above the ground plane")
    if not np.all(np.isfinite(wrist)) or wrist[2] >= head[2]:
        return None
    t = head[2] / (head[2] - wrist[2])
    return head[:2] + t * (wrist[:2] - head[:2])


# --- kernel density ----------------------------------------------------------

def scott_bandwidth(points: np.ndarray, floor: float = 0.05) -> float:
    """Scott's rule for 2-D data: n^(-1/6) times the mean per-axis spread.

    The spread estimate is floored so a tight cluster still yields a usable
    kernel scale.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    n = points.shape[0]
    if n == 0:
        raise GestureError("bandwidth needs at least one point")
    sigma = float(points.std(axis=0, ddof=0).mean())
    sigma = max(sigma, floor)
    return n ** (-1.0 / 6.0) * sigma


def kde_density(points: np.ndarray, query: np.ndarray, bandwidth: float) -> np.ndarray:
    """Isotropic 2-D Gaussian kernel density of `points` at `query` locations."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if points.shape[0] == 0:
        raise GestureError("kernel density needs at least one point")
    if bandwidth <= 0:
        raise GestureError("bandwidth must be positive")
    query = np.asarray(query, dtype=float)
    scalar = query.ndim == 1
    q = np.atleast_2d(query)
    d2 = ((q[:, None, :] - points[None, :, :]) ** 2).sum(axis=2)
    dens = np.exp(-d2 / (2.0 * bandwidth ** 2)).sum(axis=1)
    dens /= points.shape[0] * bandwidth ** 2 * TWO_PI
    return float(dens[0]) if scalar else dens


def kde_evaluator(points: np.ndarray, bandwidth="auto", floor: float = 0.05):
    """Bind points and bandwidth into a reusable density function.

    Returns (f, h) where f maps ground points to densities; "auto" picks the
    bandwidth by Scott's rule.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    h = scott_bandwidth(points, floor) if bandwidth == "auto" else float(bandwidth)
    if h <= 0:
        raise GestureError("bandwidth must be positive")

    def f(query):
        return kde_density(points, query, h)

    return f, h


# --- segment detection -------------------------------------------------------

def _smooth_directions(dirs: np.ndarray, half: int) -> np.ndarray:
    """Centered moving average of unit vectors, truncated at the ends."""
    if half <= 0 or dirs.shape[0] <= 1:
        return dirs
    m = dirs.shape[0]
    out = np.empty_like(dirs)
    csum = np.vstack([np.zeros((1, 3)), np.cumsum(dirs, axis=0)])
    for k in range(m):
        lo = max(0, k - half)
        hi = min(m, k + half + 1)
        out[k] = (csum[hi] - csum[lo]) / (hi - lo)
    norms = np.linalg.norm(out, axis=1, keepdims=True)
    norms[norms < 1e-12] = 1.0
    return out / norms


def _angular_speeds(dirs: np.ndarray, times: np.ndarray) -> np.ndarray:
    dots = np.clip((dirs[:-1] * dirs[1:]).sum(axis=1), -1.0, 1.0)
    return np.arccos(dots) / np.diff(times)


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Maximal [start, end] index runs where the boolean mask holds."""
    runs = []
    start = None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, mask.size - 1))
    return runs


def detect_pointing_segments(traj: GestureTrajectory,
                             params: DetectionParams = DetectionParams()
                             ) -> list[PointingSegment]:
    """Find stable pointing stretches per hand.

    Within each maximal stretch where the wrist is present and raised,
    pointing-ray directions are smoothed by a centered moving average
    (truncated at the stretch ends) and the stretch is split wherever the
    smoothed ray turns faster than the angular-velocity limit; surviving
    pieces shorter than the minimum duration are dropped. The smoothing
    makes the velocity gate measure deliberate arm motion rather than
    per-sample sensor jitter.
    """
    if np.any(traj.head[:, 2] <= 0):
        raise GestureError("head must stay above the ground plane")
    if len(traj) < 2:
        return []
    times = traj.times
    dt = float(np.median(np.diff(times)))
    half = int(round(params.smoothing_window_s / (2.0 * dt))) if dt > 0 else 0

    segments: list[PointingSegment] = []
    for hand in sorted(traj.hands):
        wrist = traj.hands[hand]
        present = np.all(np.isfinite(wrist), axis=1)
        raised = present & (wrist[:, 2] >= params.wrist_height_min)
        for lo, hi in _runs(raised):
            rays = wrist[lo:hi + 1] - traj.head[lo:hi + 1]
            norms = np.linalg.norm(rays, axis=1, keepdims=True)
            norms[norms < 1e-12] = 1.0
            dirs = _smooth_directions(rays / norms, half)
            run_times = times[lo:hi + 1]
            m = dirs.shape[0]
            speeds = _angular_speeds(dirs, run_times) if m > 1 else np.zeros(0)

            def add(a: int, b: int) -> None:
                if run_times[b] - run_times[a] >= params.min_duration:
                    segments.append(PointingSegment(
                        hand=hand, start=lo + a, end=lo + b,
                        start_time=float(run_times[a]), end_time=float(run_times[b]),
                    ))

            start = 0
            for k in range(m - 1):
                if speeds[k] > params.max_ray_angular_velocity:
                    add(start, k)
                    start = k + 1
            add(start, m - 1)
    segments.sort(key=lambda s: (s.start_time, s.hand))
    return segments


def segment_ground_points(traj: GestureTrajectory,
                          segments: list[PointingSegment]) -> np.ndarray:
    """Ground hit points of every segment sample, pooled across segments."""
    points = []
    for seg in segments:
        wrist = traj.hands[seg.hand]
        for k in range(seg.start, seg.end + 1):
            hit = ray_ground_intersection(traj.head[k], wrist[k])
            if hit is not None:
                points.append(hit)
    if not points:
        return np.zeros((0, 2))
    return np.array(points)


# --- scoring -----------------------------------------------------------------

def _uniform_result(scene: Scene) -> PointingResult:
    n = len(scene.objects)
    return PointingResult(detected=False, scores=np.full(n, 1.0 / n),
                          object_ids=tuple(o.id for o in scene.objects),
                          target=None)


def estimate_pointing(traj: GestureTrajectory, scene: Scene,
                      params: DetectionParams = DetectionParams(),
                      bandwidth="auto") -> PointingResult:
    """Score every scene object by how strongly the gesture points at it.

    One hand does the pointing: the hand of the earliest detected segment.
    Hit points from all of that hand's segments feed one kernel density;
    objects are scored by the density at their ground positions (normalized
    to sum to 1) and the reported target is the densest hit point. Without a
    stable segment, without ground hits, or with zero density at every
    object, scores fall back to uniform and the result is flagged as not
    detected.
    """
    if len(scene.objects) == 0:
        raise GestureError("scene has no objects to score")
    segments = detect_pointing_segments(traj, params)
    if not segments:
        return _uniform_result(scene)
    pointing_hand = segments[0].hand
    segments = [s for s in segments if s.hand == pointing_hand]
    points = segment_ground_points(traj, segments)
    if points.shape[0] == 0:
        return _uniform_result(scene)
    f, h = kde_evaluator(points, bandwidth, params.bandwidth_floor)
    at_points = f(points)
    target = points[int(np.argmax(at_points))]
    raw = f(scene.positions())
    total = float(raw.sum())
    if total <= 0.0:
        return _uniform_result(scene)
    return PointingResult(detected=True, scores=raw / total,
                          object_ids=tuple(o.id for o in scene.objects),
                          target=target, segments=tuple(segments),
                          points=points, bandwidth=h)


def click_pointing(scene: Scene, point,
                   bandwidth: float = DEFAULT_CLICK_BANDWIDTH) -> PointingResult:
    """Treat a clicked ground point as a single-sample pointing density."""
    if len(scene.objects) == 0:
        raise GestureError("scene has no objects to score")
    point = np.asarray(point, dtype=float)
    if point.shape != (2,):
        raise GestureError("click point must be a 2-vector")
    pts = point[None, :]
    raw = kde_density(pts, scene.positions(), bandwidth)
    total = float(raw.sum())
    if total <= 0.0:
        return _uniform_result(scene)
    return PointingResult(detected=True, scores=raw / total,
                          object_ids=tuple(o.id for o in scene.objects),
                          target=point, points=pts, bandwidth=bandwidth)


# --- serialization -----------------------------------------------------------

def trajectory_to_dict(traj: GestureTrajectory) -> dict:
    """Pinned wire format: rate plus per-sample head and nullable wrists."""
    samples = []
    for k, t in enumerate(traj.times):
        sample: dict = {"t": float(t), "head": [float(x) for x in traj.head[k]]}
        for hand in ("left", "right"):
            wrist = traj.hands.get(hand)
            if wrist is None or not np.all(np.isfinite(wrist[k])):
                sample[hand] = None
            else:
                sample[hand] = [float(x) for x in wrist[k]]
        samples.append(sample)
    return {"rate_hz": traj.rate_hz, "samples": samples}


def trajectory_from_dict(data: dict) -> GestureTrajectory:
    samples = data.get("samples", [])
    if not samples:
        raise GestureError("trajectory has no samples")
    n = len(samples)
    times = np.array([float(s["t"]) for s in samples])
    head = np.array([s["head"] for s in samples], dtype=float)
    hands: dict[str, np.ndarray] = {}
    for hand in ("left", "right"):
        rows = [s.get(hand) for s in samples]
        if all(r is None for r in rows):
            continue
        wrist = np.full((n, 3), np.nan)
        for k, row in enumerate(rows):
            if row is not None:
                wrist[k] = row
        hands[hand] = wrist
    rate = data.get("rate_hz")
    return GestureTrajectory(times=times, head=head, hands=hands,
                             rate_hz=None if rate is None else float(rate))
