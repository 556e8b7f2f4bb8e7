import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from signsense import catalog, synth
from signsense.ingest import DegenerateInputError, FrameSeries, SchemaError
from signsense.kinematics import (
    acceleration,
    arm_elevation,
    compose_head_rotation,
    derive_all,
    head_euler,
    pair_distance,
    torso_orientation,
    velocity,
)


class TestVelocity:
    def test_constant_signal(self):
        assert velocity(np.array([2.0, 2.0, 2.0]), 25.0).tolist() == [0.0, 0.0, 0.0]

    def test_forward_difference(self):
        assert velocity(np.array([0.0, 1.0, 3.0]), 10.0).tolist() == [0.0, 10.0, 20.0]

    def test_analytic_ramp(self):
        # x[t] = 0.04 t sampled at 25 fps has derivative exactly 1.0.
        t = np.arange(50, dtype=float)
        v = velocity(0.04 * t, 25.0)
        np.testing.assert_allclose(v[1:], 1.0, rtol=0, atol=1e-9)
        assert v[0] == 0.0

    def test_too_short(self):
        with pytest.raises(DegenerateInputError):
            velocity(np.array([1.0]), 25.0)

    @given(
        st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=20),
        st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=20),
        st.floats(-3, 3, allow_nan=False),
        st.floats(-3, 3, allow_nan=False),
    )
    @settings(max_examples=60, deadline=None)
    def test_linearity(self, xs, ys, a, b):
        n = min(len(xs), len(ys))
        x = np.array(xs[:n])
        y = np.array(ys[:n])
        lhs = velocity(a * x + b * y, 30.0)
        rhs = a * velocity(x, 30.0) + b * velocity(y, 30.0)
        np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-11)


class TestAcceleration:
    def test_constant(self):
        assert acceleration(np.array([4.0] * 5), 25.0).tolist() == [0.0] * 5

    def test_linear_ramp_zero_after_warmup(self):
        a = acceleration(np.arange(6, dtype=float), 10.0)
        assert a[2:].tolist() == [0.0] * 4

    def test_quadratic(self):
        # Second difference of t^2 at fps 1 is exactly 2.
        t = np.arange(8, dtype=float)
        a = acceleration(t * t, 1.0)
        assert a[2:].tolist() == [2.0] * 6


class TestPairDistance:
    def test_identical_points(self):
        a = np.ones((4, 3))
        assert pair_distance(a, a).tolist() == [0.0] * 4

    def test_3_4_5_triangle(self):
        a = np.zeros((1, 3))
        b = np.array([[3.0, 4.0, 0.0]])
        assert pair_distance(a, b).tolist() == [5.0]

    def test_matches_per_frame_oracle(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(10, 3))
        b = rng.normal(size=(10, 3))
        np.testing.assert_allclose(
            pair_distance(a, b), synth.oracle_pair_distance(a, b), rtol=0, atol=1e-12
        )

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            pair_distance(np.zeros((3, 3)), np.zeros((4, 3)))

    def test_symmetry_and_triangle_inequality(self):
        rng = np.random.default_rng(9)
        a, b, c = rng.normal(size=(3, 6, 3))
        ab = pair_distance(a, b)
        np.testing.assert_array_equal(ab, pair_distance(b, a))
        assert (ab >= 0).all()
        assert (ab <= pair_distance(a, c) + pair_distance(c, b) + 1e-12).all()


def embed(rotation):
    m = np.eye(4)
    m[:3, :3] = rotation
    return m


class TestHeadEuler:
    def test_identity(self):
        assert head_euler(np.eye(4)) == (0.0, 0.0, 0.0)

    def test_pure_yaw_30(self):
        m = embed(compose_head_rotation(0.0, 30.0, 0.0))
        pitch, yaw, roll = head_euler(m)
        assert abs(yaw - 30.0) < 1e-9
        assert abs(pitch) < 1e-9 and abs(roll) < 1e-9

    def test_gimbal_pitch_clamps_and_zeroes_roll(self):
        m = embed(compose_head_rotation(90.0, 25.0, 0.0))
        pitch, _yaw, roll = head_euler(m)
        assert abs(pitch - 90.0) < 1e-6
        assert roll == 0.0

    def test_round_trip_1000_random_rotations(self):
        rng = np.random.default_rng(17)
        for _ in range(1000):
            pitch = rng.uniform(-89.0, 89.0)
            yaw = rng.uniform(-180.0, 180.0)
            roll = rng.uniform(-180.0, 180.0)
            got = head_euler(embed(compose_head_rotation(pitch, yaw, roll)))
            assert abs(got[0] - pitch) < 1e-6
            assert abs(got[1] - yaw) < 1e-6
            assert abs(got[2] - roll) < 1e-6

    def test_nan_rejected(self):
        m = np.eye(4)
        m[0, 0] = math.nan
        with pytest.raises(ValueError):
            head_euler(m)


class TestArmElevation:
    def test_parallel(self):
        assert arm_elevation((0, 0, 0), (0, 1, 0), (0, 1, 0)) == 0.0

    def test_perpendicular(self):
        assert abs(arm_elevation((0, 0, 0), (1, 0, 0), (0, 1, 0)) - 90.0) < 1e-12

    def test_45_degrees(self):
        # u = (1, 1, 0), v = (0, 1, 0): cos = 1/sqrt(2).
        assert abs(arm_elevation((0, 0, 0), (1, 1, 0), (0, 1, 0)) - 45.0) < 1e-9

    def test_zero_vector_degenerate(self):
        assert arm_elevation((0, 0, 0), (0, 0, 0), (0, 1, 0)) == 0.0

    @given(st.floats(0.01, 100), st.floats(0.01, 100))
    @settings(max_examples=40, deadline=None)
    def test_scale_invariance(self, s1, s2):
        base = arm_elevation((0, 0, 0), (1, 2, 3), (3, 1, 0))
        scaled = arm_elevation((0, 0, 0), (s1 * 1, s1 * 2, s1 * 3), (3 * s2, s2, 0))
        assert abs(base - scaled) < 1e-7


class TestTorsoOrientation:
    def run(self, left, right):
        l_sh = np.array([left], dtype=float)
        r_sh = np.array([right], dtype=float)
        hips = np.zeros((1, 3))
        yaw, roll = torso_orientation(l_sh, r_sh, hips, hips)
        return yaw[0], roll[0]

    def test_level_shoulders(self):
        yaw, roll = self.run((0, 1, 0), (0.4, 1, 0))
        assert yaw == 0.0 and roll == 0.0

    def test_right_shoulder_closer_to_camera(self):
        # s = (0.3, 0, -0.1) -> yaw = atan2(-0.1, 0.3).
        yaw, _ = self.run((0.2, 1, 0.1), (0.5, 1, 0.0))
        assert abs(yaw - math.degrees(math.atan2(-0.1, 0.3))) < 1e-9
        assert abs(yaw - (-18.434948822922010)) < 1e-9

    def test_right_shoulder_higher(self):
        _, roll = self.run((0.2, 1.0, 0), (0.5, 1.3, 0))
        assert abs(roll - 45.0) < 1e-9

    def test_coincident_shoulders(self):
        yaw, roll = self.run((0.2, 1, 0), (0.2, 1, 0))
        assert yaw == 0.0 and roll == 0.0


class TestDeriveAll:
    def test_still_body_zero_motion(self):
        series = synth.gen_motion("still", fps=25, duration_s=0.4)
        derived = derive_all(series)
        for name in catalog.VELOCITY_CHANNELS + catalog.ACCELERATION_CHANNELS:
            assert not derived.channels[name].any(), name

    def test_channel_count_matches_catalog(self):
        series = synth.gen_motion("still", fps=25, duration_s=0.4)
        derived = derive_all(series)
        assert list(derived.channels) == list(catalog.DERIVED_CHANNELS)
        assert len(derived.channels) == catalog.DERIVED_CHANNEL_COUNT
        for signal in derived.channels.values():
            assert len(signal) == series.frame_count

    def test_moving_wrist_distance_matches_oracle(self):
        series = synth.gen_motion("sinusoid", fps=25, duration_s=1.0,
                                  channel="pose_RIGHT_WRIST_x")
        derived = derive_all(series)
        expected = synth.oracle_pair_distance(
            series.point("pose_LEFT_WRIST"), series.point("pose_RIGHT_WRIST")
        )
        np.testing.assert_allclose(
            derived.channels["dist_wrists_lr"], expected, rtol=0, atol=1e-12
        )

    def test_requires_repaired_series(self):
        series = synth.gen_motion("still", fps=25, duration_s=0.4)
        holed = FrameSeries(
            series.segment_id, series.tale_id, series.fps,
            series.frames, series.valid.copy(),
        )
        holed.valid[0, 0] = False
        with pytest.raises(SchemaError):
            derive_all(holed)

    def test_translation_invariance(self):
        series = synth.gen_motion("sinusoid", fps=25, duration_s=1.0)
        shifted_frames = series.frames.copy()
        for point in catalog.POSE_POINTS + catalog.HAND_POINTS:
            for axis, off in zip(catalog.AXES, (0.7, -0.3, 0.2)):
                shifted_frames[:, catalog.RAW_INDEX[f"{point}_{axis}"]] += off
        shifted = FrameSeries(
            series.segment_id, series.tale_id, series.fps,
            shifted_frames, series.valid,
        )
        base = derive_all(series)
        moved = derive_all(shifted)
        for name in (
            catalog.VELOCITY_CHANNELS
            + catalog.ACCELERATION_CHANNELS
            + catalog.DISTANCE_CHANNELS
            + catalog.ARM_CHANNELS
        ):
            np.testing.assert_allclose(
                base.channels[name], moved.channels[name], rtol=0, atol=1e-9
            )
        # Raw positions did change: the invariance is not vacuous.
        assert not np.array_equal(series.frames, shifted_frames)
