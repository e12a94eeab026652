"""Gesture analysis: rays, kernel densities, segment detection, scoring."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pointref.gesture import (
    DetectionParams,
    GestureError,
    GestureTrajectory,
    click_pointing,
    detect_pointing_segments,
    estimate_pointing,
    kde_density,
    kde_evaluator,
    ray_ground_intersection,
    scott_bandwidth,
    segment_ground_points,
    trajectory_from_dict,
    trajectory_to_dict,
)
from pointref.scene import Scene

from conftest import make_object

HEAD = np.array([0.0, 0.0, 1.6])

# Independently derived: the ray from (0,0,1.6) through (0.3,0,1.2) drops
# 0.4 m per 0.3 m of x-travel, so it reaches the ground (1.6 / 0.4 = 4 wrist
# offsets) at x = 4 * 0.3 = 1.2.
RAY_CASE = (HEAD, np.array([0.3, 0.0, 1.2]), np.array([1.2, 0.0]))

INV_TWO_PI = 0.15915494309189535  # 1 / (2*pi)


def rigid_trajectory(wrist, *, n=10, dt=0.1, hand="right", head=HEAD):
    """Constant head and wrist over n samples."""
    times = np.arange(n) * dt
    return GestureTrajectory(
        times=times,
        head=np.tile(head, (n, 1)),
        hands={hand: np.tile(np.asarray(wrist, dtype=float), (n, 1))},
    )


class TestRay:
    def test_closed_form_example(self):
        head, wrist, expected = RAY_CASE
        assert np.allclose(ray_ground_intersection(head, wrist), expected)

    @given(wx=st.floats(-1, 1), wy=st.floats(-1, 1),
           wz=st.floats(0.1, 1.5))
    def test_hit_point_lies_on_the_ray(self, wx, wy, wz):
        wrist = np.array([wx, wy, wz])
        if wz >= HEAD[2] or np.allclose(wrist[:2], HEAD[:2]):
            return
        hit = ray_ground_intersection(HEAD, wrist)
        # the hit, wrist, and head must be collinear in 3D (z of hit is 0)
        t = HEAD[2] / (HEAD[2] - wz)
        full = HEAD + t * (wrist - HEAD)
        assert abs(full[2]) < 1e-12
        assert np.allclose(hit, full[:2])

    def test_wrist_at_or_above_head_casts_no_ray(self):
        assert ray_ground_intersection(HEAD, np.array([0.3, 0, 1.6])) is None
        assert ray_ground_intersection(HEAD, np.array([0.3, 0, 2.0])) is None

    def test_missing_wrist_casts_no_ray(self):
        assert ray_ground_intersection(HEAD, np.array([np.nan] * 3)) is None

    def test_head_below_ground_is_invalid(self):
        with pytest.raises(GestureError, match="head"):
            ray_ground_intersection(np.array([0, 0, 0.0]), np.array([0, 0, -1.0]))


class TestKde:
    def test_single_point_unit_bandwidth(self):
        assert kde_density(np.array([[2.0, 3.0]]), np.array([2.0, 3.0]),
                           1.0) == pytest.approx(INV_TWO_PI, rel=1e-12)

    def test_repeated_points_do_not_change_the_density(self):
        pts = np.tile([[2.0, 3.0]], (5, 1))
        assert kde_density(pts, np.array([2.0, 3.0]),
                           1.0) == pytest.approx(INV_TWO_PI, rel=1e-12)

    def test_two_cluster_example(self):
        # 80 points at (1,0) and 20 at (-1,0), bandwidth 0.2: the cross-cluster
        # kernel mass is e^{-50}, so the densities are essentially 80/(100 h^2 2pi)
        # and 20/(100 h^2 2pi).
        pts = np.vstack([np.tile([[1.0, 0.0]], (80, 1)),
                         np.tile([[-1.0, 0.0]], (20, 1))])
        f, h = kde_evaluator(pts, bandwidth=0.2)
        assert h == 0.2
        assert f(np.array([1.0, 0.0])) == pytest.approx(3.183098861837907, rel=1e-12)
        assert f(np.array([-1.0, 0.0])) == pytest.approx(0.7957747154594768, rel=1e-12)

    def test_array_queries_match_scalar_queries(self):
        pts = np.array([[0.0, 0.0], [1.0, 1.0]])
        queries = np.array([[0.5, 0.5], [2.0, 0.0]])
        batch = kde_density(pts, queries, 0.3)
        assert batch.shape == (2,)
        for q, d in zip(queries, batch):
            assert kde_density(pts, q, 0.3) == pytest.approx(d, rel=1e-12)

    @given(cx=st.floats(-3, 3), cy=st.floats(-3, 3))
    def test_translation_invariance(self, cx, cy):
        pts = np.array([[0.0, 0.0], [0.4, -0.2], [1.0, 0.3]])
        q = np.array([0.3, 0.1])
        shift = np.array([cx, cy])
        base = kde_density(pts, q, 0.5)
        moved = kde_density(pts + shift, q + shift, 0.5)
        assert moved == pytest.approx(base, rel=1e-9)

    def test_empty_points_rejected(self):
        with pytest.raises(GestureError, match="at least one point"):
            kde_density(np.zeros((0, 2)), np.array([0.0, 0.0]), 1.0)

    def test_nonpositive_bandwidth_rejected(self):
        with pytest.raises(GestureError, match="bandwidth"):
            kde_density(np.array([[0.0, 0.0]]), np.array([0.0, 0.0]), 0.0)


class TestScottBandwidth:
    def test_known_spread(self):
        # 100 points, per-axis deviation exactly 0.1 on both axes:
        # h = 100^(-1/6) * 0.1
        pts = np.vstack([np.tile([[0.1, 0.1]], (50, 1)),
                         np.tile([[-0.1, -0.1]], (50, 1))])
        assert scott_bandwidth(pts) == pytest.approx(0.046415888336127795, rel=1e-12)

    def test_tight_cluster_hits_the_floor(self):
        pts = np.tile([[1.0, 2.0]], (1, 1))
        assert scott_bandwidth(pts) == pytest.approx(0.05, rel=1e-12)

    def test_floor_is_adjustable(self):
        pts = np.tile([[1.0, 2.0]], (64, 1))
        assert scott_bandwidth(pts, floor=0.2) == pytest.approx(
            64 ** (-1 / 6) * 0.2, rel=1e-12)

    def test_no_points_rejected(self):
        with pytest.raises(GestureError, match="at least one point"):
            scott_bandwidth(np.zeros((0, 2)))


class TestDetection:
    def test_rigid_raised_pointing_yields_one_segment(self):
        traj = rigid_trajectory([0.3, 0, 1.2], n=10, dt=0.1)
        segments = detect_pointing_segments(traj)
        assert len(segments) == 1
        seg = segments[0]
        assert (seg.start, seg.end) == (0, 9)
        assert seg.end_time - seg.start_time == pytest.approx(0.9)

    def test_low_wrist_is_not_pointing(self):
        traj = rigid_trajectory([0.3, 0, 0.9], n=10, dt=0.1)
        assert detect_pointing_segments(traj) == []

    def test_fast_sweep_is_not_pointing(self):
        # wrist circles the head once per second: the smoothed ray turns at
        # several rad/s, far beyond the 0.5 rad/s stability gate
        n, dt = 40, 0.05
        times = np.arange(n) * dt
        theta = 2 * np.pi * times
        wrist = np.stack([0.4 * np.cos(theta), 0.4 * np.sin(theta),
                          np.full(n, 1.2)], axis=1)
        traj = GestureTrajectory(times=times, head=np.tile(HEAD, (n, 1)),
                                 hands={"right": wrist})
        assert detect_pointing_segments(traj) == []

    def test_smoothing_rescues_sensor_jitter(self):
        # 2 degrees of per-sample direction noise at 60 Hz: raw consecutive
        # rays turn at ~3 rad/s, but the 0.35 s moving average keeps the
        # smoothed ray well under the gate.
        rng = np.random.default_rng(11)
        n = 72
        times = np.arange(n) / 60.0
        base = np.array([0.3, 0.0, -0.4])
        base = base / np.linalg.norm(base)
        wrist = np.empty((n, 3))
        for k in range(n):
            axis = np.cross(base, [0.0, 0.0, 1.0])
            axis /= np.linalg.norm(axis)
            ang = np.deg2rad(rng.normal(0.0, 2.0))
            spin = rng.uniform(0, 2 * np.pi)
            # random tangent direction: rotate `axis` around base by `spin`
            tangent = axis * np.cos(spin) + np.cross(base, axis) * np.sin(spin)
            d = base * np.cos(ang) + tangent * np.sin(ang)
            wrist[k] = HEAD + 0.5 * d
        traj = GestureTrajectory(times=times, head=np.tile(HEAD, (n, 1)),
                                 hands={"right": wrist})
        segments = detect_pointing_segments(traj)
        assert len(segments) == 1
        assert segments[0].end_time - segments[0].start_time >= 0.5
        # without smoothing the same recording shatters into sub-threshold bits
        raw = detect_pointing_segments(
            traj, DetectionParams(smoothing_window_s=0.0))
        assert raw == []

    def test_absent_samples_split_runs(self):
        n, dt = 20, 0.1
        times = np.arange(n) * dt
        wrist = np.tile([0.3, 0.0, 1.2], (n, 1))
        wrist[10] = np.nan
        traj = GestureTrajectory(times=times, head=np.tile(HEAD, (n, 1)),
                                 hands={"right": wrist})
        segments = detect_pointing_segments(traj)
        assert [(s.start, s.end) for s in segments] == [(0, 9), (11, 19)]

    def test_single_sample_has_no_segments(self):
        traj = rigid_trajectory([0.3, 0, 1.2], n=1)
        assert detect_pointing_segments(traj) == []

    def test_head_below_ground_rejected(self):
        traj = rigid_trajectory([0.3, 0, 1.2], n=5,
                                head=np.array([0.0, 0.0, -0.1]))
        with pytest.raises(GestureError, match="head"):
            detect_pointing_segments(traj)

    def test_segment_points_are_ray_hits(self):
        traj = rigid_trajectory([0.3, 0, 1.2], n=10, dt=0.1)
        segments = detect_pointing_segments(traj)
        points = segment_ground_points(traj, segments)
        assert points.shape == (10, 2)
        assert np.allclose(points, RAY_CASE[2])


class TestEstimatePointing:
    def scene(self):
        return Scene(objects=(make_object("near_ray", 1.2, 0),
                              make_object("far", 3.0, 2.0)))

    def test_steady_point_scores_the_aimed_object(self):
        traj = rigid_trajectory([0.3, 0, 1.2], n=10, dt=0.1)
        result = estimate_pointing(traj, self.scene())
        assert result.detected
        assert result.object_ids == ("near_ray", "far")
        assert np.isclose(result.scores.sum(), 1.0)
        assert int(np.argmax(result.scores)) == 0
        assert np.allclose(result.target, [1.2, 0.0])

    def test_no_segments_means_uniform_undetected(self):
        traj = rigid_trajectory([0.3, 0, 0.9], n=10, dt=0.1)
        result = estimate_pointing(traj, self.scene())
        assert not result.detected
        assert np.allclose(result.scores, [0.5, 0.5])
        assert result.target is None

    def test_zero_density_everywhere_means_undetected(self):
        scene = Scene(objects=(make_object("a", 0.5, 0),
                               make_object("b", 0.7, 0)))
        # aim three km away: kernel mass at the objects underflows to zero
        traj = rigid_trajectory([0.3, 0, 1.5999], n=10, dt=0.1)
        result = estimate_pointing(traj, scene)
        assert not result.detected
        assert np.allclose(result.scores, [0.5, 0.5])

    def test_first_hand_to_point_wins(self):
        n, dt = 12, 0.1
        times = np.arange(n) * dt
        left = np.tile([0.3, 0.0, 1.2], (n, 1))       # aims (1.2, 0)
        right = np.tile([-0.3, 0.0, 1.2], (n, 1))     # aims (-1.2, 0)
        right[:4] = np.nan                            # starts pointing later
        traj = GestureTrajectory(times=times, head=np.tile(HEAD, (n, 1)),
                                 hands={"left": left, "right": right})
        scene = Scene(objects=(make_object("ahead", 1.2, 0),
                               make_object("behind", -1.2, 0)))
        result = estimate_pointing(traj, scene)
        assert result.detected
        assert all(s.hand == "left" for s in result.segments)
        assert int(np.argmax(result.scores)) == 0

    def test_empty_scene_rejected(self):
        traj = rigid_trajectory([0.3, 0, 1.2], n=10, dt=0.1)
        with pytest.raises(GestureError, match="no objects"):
            estimate_pointing(traj, Scene(objects=()))

    def test_result_wire_format(self):
        traj = rigid_trajectory([0.3, 0, 1.2], n=10, dt=0.1)
        data = estimate_pointing(traj, self.scene()).to_dict()
        assert data["detected"] is True
        assert set(data["scores"]) == {"near_ray", "far"}
        assert data["target"] == {"x": pytest.approx(1.2), "y": pytest.approx(0.0)}
        assert data["num_points"] == 10
        assert data["segments"][0]["hand"] == "right"


class TestClickPointing:
    def test_click_on_an_object_selects_it(self):
        scene = Scene(objects=(make_object("a", 1, 0), make_object("b", 2, 0)))
        result = click_pointing(scene, (1.0, 0.0))
        assert result.detected
        # object distances 0 and 1 with bandwidth 0.25 give a logistic split
        # at distance^2 / (2 h^2) = 8 log-odds
        assert result.scores[0] == pytest.approx(0.9996646498695336, rel=1e-12)
        assert np.isclose(result.scores.sum(), 1.0)
        assert np.allclose(result.target, [1.0, 0.0])
        assert result.bandwidth == 0.25

    def test_click_shape_validated(self):
        scene = Scene(objects=(make_object("a", 1, 0),))
        with pytest.raises(GestureError, match="2-vector"):
            click_pointing(scene, (1.0, 0.0, 0.0))


class TestTrajectorySerialization:
    def test_round_trip_with_missing_hand_samples(self):
        n, dt = 6, 0.1
        times = np.arange(n) * dt
        left = np.tile([0.3, 0.0, 1.2], (n, 1))
        left[2] = np.nan
        traj = GestureTrajectory(times=times, head=np.tile(HEAD, (n, 1)),
                                 hands={"left": left}, rate_hz=10.0)
        data = trajectory_to_dict(traj)
        assert data["rate_hz"] == 10.0
        assert data["samples"][2]["left"] is None
        assert data["samples"][0]["right"] is None
        back = trajectory_from_dict(data)
        assert set(back.hands) == {"left"}
        assert np.isnan(back.hands["left"][2]).all()
        assert trajectory_to_dict(back) == data

    def test_empty_samples_rejected(self):
        with pytest.raises(GestureError, match="no samples"):
            trajectory_from_dict({"rate_hz": 60.0, "samples": []})

    def test_times_must_increase(self):
        with pytest.raises(GestureError, match="increasing"):
            GestureTrajectory(times=np.array([0.0, 0.0]),
                              head=np.tile(HEAD, (2, 1)), hands={})

    def test_track_shapes_validated(self):
        with pytest.raises(GestureError, match="head track"):
            GestureTrajectory(times=np.array([0.0, 0.1]),
                              head=np.tile(HEAD, (3, 1)), hands={})
        with pytest.raises(GestureError, match="wrist track"):
            GestureTrajectory(times=np.array([0.0, 0.1]),
                              head=np.tile(HEAD, (2, 1)),
                              hands={"left": np.zeros((3, 3))})
