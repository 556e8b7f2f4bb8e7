"""Frame-level derived signals: derivatives, distances, and body angles.

All functions are pure and operate on fully repaired series (no missing
samples). Angles are reported in degrees throughout.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import catalog
from .ingest import DegenerateInputError, FrameSeries, SchemaError

logger = logging.getLogger(__name__)

_EPS = 1e-9
_ORTHO_TOL = 1e-3


@dataclass(frozen=True)
class DerivedSeries:
    """Named derived signals, each with the same frame count as the source."""

    segment_id: str
    fps: float
    channels: dict[str, np.ndarray]

    @property
    def frame_count(self) -> int:
        return len(next(iter(self.channels.values())))


def velocity(signal: np.ndarray, fps: float) -> np.ndarray:
    """Forward-difference rate of change in channel-units per second.

    v[0] is defined as 0 so the output length matches the input; the
    forward difference keeps the signal causal.
    """
    signal = np.asarray(signal, dtype=float)
    if signal.shape[0] < 2:
        raise DegenerateInputError("velocity needs at least 2 samples")
    v = np.empty_like(signal)
    v[0] = 0.0
    v[1:] = (signal[1:] - signal[:-1]) * fps
    return v


def acceleration(signal: np.ndarray, fps: float) -> np.ndarray:
    return velocity(velocity(signal, fps), fps)


def pair_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-frame Euclidean distance between two F x 3 trajectories."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"trajectory shapes differ: {a.shape} vs {b.shape}")
    return np.linalg.norm(a - b, axis=-1)


def head_euler(transform: np.ndarray) -> tuple[float, float, float]:
    """Decompose a 4x4 head transform into (pitch, yaw, roll) degrees.

    Convention: intrinsic yaw(Y) * pitch(X) * roll(Z), so
        yaw  = atan2(r02, r22)
        pitch = asin(-r12)   (clamped)
        roll = atan2(r10, r11)
    In the gimbal case (|pitch| = 90 deg) roll is forced to 0 and yaw
    absorbs the remaining rotation.
    """
    t = np.asarray(transform, dtype=float)
    r = t[:3, :3]
    if np.isnan(r).any():
        raise ValueError("rotation block contains NaN")
    err = np.abs(r.T @ r - np.eye(3)).max()
    if err >= _ORTHO_TOL:
        logger.warning("rotation block not orthonormal (|R'R - I| = %.2e)", err)
    s = min(1.0, max(-1.0, -r[1, 2]))
    pitch = math.asin(s)
    if 1.0 - abs(s) < 1e-12:
        # Gimbal: r02/r22 degenerate; recover combined rotation as yaw only.
        yaw = math.atan2(-r[2, 0], r[0, 0])
        roll = 0.0
    else:
        yaw = math.atan2(r[0, 2], r[2, 2])
        roll = math.atan2(r[1, 0], r[1, 1])
    return math.degrees(pitch), math.degrees(yaw), math.degrees(roll)


def compose_head_rotation(pitch_deg: float, yaw_deg: float, roll_deg: float) -> np.ndarray:
    """Inverse of head_euler: build the rotation matrix yaw(Y)*pitch(X)*roll(Z)."""
    p, y, r = (math.radians(v) for v in (pitch_deg, yaw_deg, roll_deg))
    ry = np.array(
        [
            [math.cos(y), 0.0, math.sin(y)],
            [0.0, 1.0, 0.0],
            [-math.sin(y), 0.0, math.cos(y)],
        ]
    )
    rx = np.array(
        [
            [1.0, 0.0, 0.0],
            [0.0, math.cos(p), -math.sin(p)],
            [0.0, math.sin(p), math.cos(p)],
        ]
    )
    rz = np.array(
        [
            [math.cos(r), -math.sin(r), 0.0],
            [math.sin(r), math.cos(r), 0.0],
            [0.0, 0.0, 1.0],
        ]
    )
    return ry @ rx @ rz


def arm_elevation(shoulder: np.ndarray, elbow: np.ndarray, torso_axis: np.ndarray) -> float:
    """Angle in degrees between the shoulder->elbow vector and the torso axis."""
    u = np.asarray(elbow, dtype=float) - np.asarray(shoulder, dtype=float)
    v = np.asarray(torso_axis, dtype=float)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu <= _EPS or nv <= _EPS:
        logger.warning("degenerate arm/torso vector, angle reported as 0")
        return 0.0
    c = float(np.dot(u, v) / (nu * nv))
    return math.degrees(math.acos(min(1.0, max(-1.0, c))))


def torso_orientation(
    l_sh: np.ndarray, r_sh: np.ndarray, l_hip: np.ndarray, r_hip: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Per-frame torso yaw/roll in degrees from the shoulder line.

    With s = right_shoulder - left_shoulder: yaw = atan2(s_z, s_x),
    roll = atan2(s_y, s_x). Hips are accepted for interface symmetry but
    the convention is shoulder-line only. Coincident shoulders yield 0.
    """
    s = np.asarray(r_sh, dtype=float) - np.asarray(l_sh, dtype=float)
    degenerate = np.linalg.norm(s, axis=-1) <= _EPS
    if degenerate.any():
        logger.warning("coincident shoulders on %d frames, torso angles set to 0",
                       int(degenerate.sum()))
    yaw = np.degrees(np.arctan2(s[:, 2], s[:, 0]))
    roll = np.degrees(np.arctan2(s[:, 1], s[:, 0]))
    yaw[degenerate] = 0.0
    roll[degenerate] = 0.0
    return yaw, roll


def _torso_axis(series: FrameSeries) -> np.ndarray:
    """Per-frame axis from hip midpoint up to shoulder midpoint."""
    sh_mid = 0.5 * (series.point("pose_LEFT_SHOULDER") + series.point("pose_RIGHT_SHOULDER"))
    hip_mid = 0.5 * (series.point("pose_LEFT_HIP") + series.point("pose_RIGHT_HIP"))
    return sh_mid - hip_mid


def derive_all(series: FrameSeries) -> DerivedSeries:
    """Compute the full derived-channel set for one repaired segment.

    Output keys follow catalog.DERIVED_CHANNELS exactly; every signal has
    the source frame count.
    """
    if not series.valid.all():
        raise SchemaError(f"{series.segment_id}: derive_all requires a repaired series")
    out: dict[str, np.ndarray] = {}
    for point in catalog.VELOCITY_POINTS:
        for axis in catalog.AXES:
            ch = f"{point}_{axis}"
            out[f"{ch}_velocity"] = velocity(series.channel(ch), series.fps)
    for point in catalog.VELOCITY_POINTS:
        for axis in catalog.AXES:
            ch = f"{point}_{axis}"
            out[f"{ch}_acceleration"] = acceleration(series.channel(ch), series.fps)
    for name, a, b in catalog.DISTANCE_PAIRS:
        out[name] = pair_distance(series.point(a), series.point(b))

    f = series.frame_count
    pitch = np.empty(f)
    yaw = np.empty(f)
    roll = np.empty(f)
    tf = series.frames[:, catalog.RAW_INDEX["head_transform_r00"] :
                       catalog.RAW_INDEX["head_transform_t2"] + 1]
    for t in range(f):
        m = np.eye(4)
        m[:3, :3] = tf[t, :9].reshape(3, 3)
        m[:3, 3] = tf[t, 9:]
        pitch[t], yaw[t], roll[t] = head_euler(m)
    out["head_pitch_deg"] = pitch
    out["head_yaw_deg"] = yaw
    out["head_roll_deg"] = roll

    axis = _torso_axis(series)
    for side, key in (("LEFT", "left_arm_angle"), ("RIGHT", "right_arm_angle")):
        sh = series.point(f"pose_{side}_SHOULDER")
        el = series.point(f"pose_{side}_ELBOW")
        out[key] = np.array([arm_elevation(sh[t], el[t], axis[t]) for t in range(f)])

    t_yaw, t_roll = torso_orientation(
        series.point("pose_LEFT_SHOULDER"),
        series.point("pose_RIGHT_SHOULDER"),
        series.point("pose_LEFT_HIP"),
        series.point("pose_RIGHT_HIP"),
    )
    out["torso_yaw"] = t_yaw
    out["torso_roll"] = t_roll

    ordered = {name: out[name] for name in catalog.DERIVED_CHANNELS}
    return DerivedSeries(series.segment_id, series.fps, ordered)
