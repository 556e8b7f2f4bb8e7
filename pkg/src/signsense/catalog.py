"""Versioned channel catalog and per-segment feature schema.

Every stage of the pipeline agrees on channel names and ordering through
this module: the landmark CSV header, the derived-signal set, and the
final feature vector are all enumerated here, once, in a frozen order.
Bump CATALOG_VERSION whenever any enumeration changes.
"""

from __future__ import annotations

import hashlib

CATALOG_VERSION = "1"

# Body points tracked in 3D, in catalog order. Axis suffixes are x, y, z.
POSE_POINTS = (
    "pose_NOSE",
    "pose_LEFT_SHOULDER",
    "pose_RIGHT_SHOULDER",
    "pose_LEFT_ELBOW",
    "pose_RIGHT_ELBOW",
    "pose_LEFT_WRIST",
    "pose_RIGHT_WRIST",
    "pose_LEFT_HIP",
    "pose_RIGHT_HIP",
)

HAND_POINTS = ("left_hand_WRIST", "right_hand_WRIST")

AXES = ("x", "y", "z")

# The 52 face activation channels emitted by the face tracker, each in [0, 1].
BLENDSHAPES = (
    "_neutral",
    "browDownLeft",
    "browDownRight",
    "browInnerUp",
    "browOuterUpLeft",
    "browOuterUpRight",
    "cheekPuff",
    "cheekSquintLeft",
    "cheekSquintRight",
    "eyeBlinkLeft",
    "eyeBlinkRight",
    "eyeLookDownLeft",
    "eyeLookDownRight",
    "eyeLookInLeft",
    "eyeLookInRight",
    "eyeLookOutLeft",
    "eyeLookOutRight",
    "eyeLookUpLeft",
    "eyeLookUpRight",
    "eyeSquintLeft",
    "eyeSquintRight",
    "eyeWideLeft",
    "eyeWideRight",
    "jawForward",
    "jawLeft",
    "jawOpen",
    "jawRight",
    "mouthClose",
    "mouthDimpleLeft",
    "mouthDimpleRight",
    "mouthFrownLeft",
    "mouthFrownRight",
    "mouthFunnel",
    "mouthLeft",
    "mouthLowerDownLeft",
    "mouthLowerDownRight",
    "mouthPressLeft",
    "mouthPressRight",
    "mouthPucker",
    "mouthRight",
    "mouthRollLower",
    "mouthRollUpper",
    "mouthShrugLower",
    "mouthShrugUpper",
    "mouthSmileLeft",
    "mouthSmileRight",
    "mouthStretchLeft",
    "mouthStretchRight",
    "mouthUpperUpLeft",
    "mouthUpperUpRight",
    "noseSneerLeft",
    "noseSneerRight",
)

# Flattened 4x4 head transform: 3x3 rotation block row-major, then translation.
HEAD_TRANSFORM_CHANNELS = (
    "head_transform_r00",
    "head_transform_r01",
    "head_transform_r02",
    "head_transform_r10",
    "head_transform_r11",
    "head_transform_r12",
    "head_transform_r20",
    "head_transform_r21",
    "head_transform_r22",
    "head_transform_t0",
    "head_transform_t1",
    "head_transform_t2",
)


def _xyz(points: tuple[str, ...]) -> tuple[str, ...]:
    return tuple(f"{p}_{a}" for p in points for a in AXES)


POSE_CHANNELS = _xyz(POSE_POINTS)
HAND_CHANNELS = _xyz(HAND_POINTS)

RAW_CHANNELS: tuple[str, ...] = (
    POSE_CHANNELS + HAND_CHANNELS + BLENDSHAPES + HEAD_TRANSFORM_CHANNELS
)
RAW_CHANNEL_COUNT = len(RAW_CHANNELS)  # 97

RAW_INDEX = {name: i for i, name in enumerate(RAW_CHANNELS)}

BLENDSHAPE_INDICES = tuple(RAW_INDEX[b] for b in BLENDSHAPES)

# Points whose per-axis velocity and acceleration become derived signals.
VELOCITY_POINTS = (
    "pose_NOSE",
    "pose_LEFT_SHOULDER",
    "pose_RIGHT_SHOULDER",
    "pose_LEFT_ELBOW",
    "pose_RIGHT_ELBOW",
    "pose_LEFT_HIP",
    "pose_RIGHT_HIP",
    "left_hand_WRIST",
    "right_hand_WRIST",
)

VELOCITY_CHANNELS = tuple(f"{c}_velocity" for c in _xyz(VELOCITY_POINTS))
ACCELERATION_CHANNELS = tuple(f"{c}_acceleration" for c in _xyz(VELOCITY_POINTS))

# Landmark pairs measured by per-frame Euclidean distance.
DISTANCE_PAIRS = (
    ("dist_wrists_lr", "pose_LEFT_WRIST", "pose_RIGHT_WRIST"),
    ("dist_elbows_lr", "pose_LEFT_ELBOW", "pose_RIGHT_ELBOW"),
    ("dist_left_wrist_to_left_shoulder", "pose_LEFT_WRIST", "pose_LEFT_SHOULDER"),
    ("dist_right_wrist_to_right_shoulder", "pose_RIGHT_WRIST", "pose_RIGHT_SHOULDER"),
    ("dist_left_wrist_to_right_shoulder", "pose_LEFT_WRIST", "pose_RIGHT_SHOULDER"),
    ("dist_right_wrist_to_left_shoulder", "pose_RIGHT_WRIST", "pose_LEFT_SHOULDER"),
    ("dist_left_wrist_to_nose", "pose_LEFT_WRIST", "pose_NOSE"),
    ("dist_right_wrist_to_nose", "pose_RIGHT_WRIST", "pose_NOSE"),
)
DISTANCE_CHANNELS = tuple(name for name, _, _ in DISTANCE_PAIRS)

ANGLE_CHANNELS = ("head_pitch_deg", "head_yaw_deg", "head_roll_deg")
ARM_CHANNELS = ("left_arm_angle", "right_arm_angle")
TORSO_CHANNELS = ("torso_yaw", "torso_roll")

DERIVED_CHANNELS: tuple[str, ...] = (
    VELOCITY_CHANNELS
    + ACCELERATION_CHANNELS
    + DISTANCE_CHANNELS
    + ANGLE_CHANNELS
    + ARM_CHANNELS
    + TORSO_CHANNELS
)
DERIVED_CHANNEL_COUNT = len(DERIVED_CHANNELS)  # 69

# Points whose total traveled path length is aggregated per segment.
ACCUM_POINTS = (
    ("L_WRIST", "pose_LEFT_WRIST"),
    ("R_WRIST", "pose_RIGHT_WRIST"),
    ("L_SHOULDER", "pose_LEFT_SHOULDER"),
    ("R_SHOULDER", "pose_RIGHT_SHOULDER"),
    ("NOSE", "pose_NOSE"),
)


def _build_feature_names() -> tuple[str, ...]:
    names: list[str] = []
    for ch in RAW_CHANNELS:
        names.append(f"{ch}_mean")
        names.append(f"{ch}_std")
    for ch in DERIVED_CHANNELS:
        # Distance means keep the historical _avg suffix; everything else
        # uses _mean. The asymmetry is frozen into the schema on purpose.
        mean_suffix = "avg" if ch in DISTANCE_CHANNELS else "mean"
        names.append(f"{ch}_{mean_suffix}")
        names.append(f"{ch}_std")
    for ch in RAW_CHANNELS:
        names.append(f"{ch}_peaks_per_s")
    for ch in DISTANCE_CHANNELS:
        names.append(f"{ch}_peaks_per_s")
    for part, _ in ACCUM_POINTS:
        names.append(f"{part}_accum_dist_avg")
    return tuple(names)


FEATURE_NAMES: tuple[str, ...] = _build_feature_names()
FEATURE_COUNT = len(FEATURE_NAMES)  # 442
FEATURE_INDEX = {name: i for i, name in enumerate(FEATURE_NAMES)}

# Size of the feature vector in the upstream pipeline this schema mirrors.
# Our enumeration is fixed and versioned; the delta is reported, not forced.
REFERENCE_FEATURE_COUNT = 396


def schema_hash() -> str:
    """Short stable digest of (version, ordered feature names)."""
    payload = CATALOG_VERSION + "\n" + "\n".join(FEATURE_NAMES)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def raw_header() -> str:
    """Header row of the canonical landmark CSV, without trailing newline."""
    return ",".join(("frame_index",) + RAW_CHANNELS)
