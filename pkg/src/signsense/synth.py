"""Synthetic fixtures with analytically known outputs, plus naive oracles.

The oracles here deliberately share no code with the implementations they
check: they are written as direct, often O(n^2), transcriptions of the
definitions. Keep them slow and obvious.
"""

from __future__ import annotations

import math

import numpy as np

from . import catalog
from .ingest import FrameSeries
from .labeling import RawVote, SentimentLabel, VoteTable

# Static body used as the backdrop for motion patterns.
_BASE_POSE = {
    "pose_NOSE": (0.50, 1.50, 0.00),
    "pose_LEFT_SHOULDER": (0.30, 1.30, 0.00),
    "pose_RIGHT_SHOULDER": (0.70, 1.30, 0.00),
    "pose_LEFT_ELBOW": (0.20, 1.05, 0.05),
    "pose_RIGHT_ELBOW": (0.80, 1.05, 0.05),
    "pose_LEFT_WRIST": (0.25, 0.85, 0.10),
    "pose_RIGHT_WRIST": (0.75, 0.85, 0.10),
    "pose_LEFT_HIP": (0.38, 0.90, 0.00),
    "pose_RIGHT_HIP": (0.62, 0.90, 0.00),
    "left_hand_WRIST": (0.25, 0.85, 0.10),
    "right_hand_WRIST": (0.75, 0.85, 0.10),
}

MOTION_PATTERNS = ("still", "ramp", "sinusoid", "plateau")


def gen_motion(
    pattern: str,
    fps: float,
    duration_s: float,
    seed: int = 0,
    channel: str = "pose_RIGHT_WRIST_x",
    amplitude: float = 1.0,
    freq_hz: float = 2.0,
    segment_id: str = "synthtale__seg000",
    tale_id: str = "synthtale",
) -> FrameSeries:
    """Deterministic FrameSeries: a static body plus one moving channel.

    still: nothing moves. ramp: linear 0..amplitude over the segment, so
    the accumulated distance of that point equals amplitude. sinusoid:
    amplitude * sin(2*pi*freq_hz*t/fps). plateau: a 3-frame flat bump in
    the middle (exactly one peak). The seed parameter is accepted for
    interface uniformity; all patterns are deterministic.
    """
    if pattern not in MOTION_PATTERNS:
        raise ValueError(f"unknown pattern {pattern!r}")
    if duration_s <= 0 or fps <= 0:
        raise ValueError("duration_s and fps must be positive")
    frame_count = int(round(duration_s * fps))
    if frame_count < 2:
        raise ValueError("pattern too short: fewer than 2 frames")

    frames = np.zeros((frame_count, catalog.RAW_CHANNEL_COUNT))
    for point, (x, y, z) in _BASE_POSE.items():
        for axis, value in zip(catalog.AXES, (x, y, z)):
            frames[:, catalog.RAW_INDEX[f"{point}_{axis}"]] = value
    # Identity head rotation, zero translation.
    for name in ("head_transform_r00", "head_transform_r11", "head_transform_r22"):
        frames[:, catalog.RAW_INDEX[name]] = 1.0

    t = np.arange(frame_count, dtype=float)
    if pattern == "ramp":
        signal = amplitude * t / (frame_count - 1)
    elif pattern == "sinusoid":
        signal = amplitude * np.sin(2.0 * math.pi * freq_hz * t / fps)
    elif pattern == "plateau":
        signal = np.zeros(frame_count)
        mid = frame_count // 2
        signal[max(1, mid - 1) : min(frame_count - 1, mid + 2)] = amplitude
    else:
        signal = np.zeros(frame_count)
    col = catalog.RAW_INDEX[channel]
    frames[:, col] = frames[:, col] + signal

    valid = np.ones_like(frames, dtype=bool)
    return FrameSeries(segment_id, tale_id, fps, frames, valid)


def _vote(*labels: SentimentLabel) -> RawVote:
    return RawVote(tuple(sorted(set(labels))))


_NEG = SentimentLabel.NEGATIVE
_NEU = SentimentLabel.NEUTRAL
_POS = SentimentLabel.POSITIVE

_BALLOT_POOL = (
    _vote(_NEG),
    _vote(_NEU),
    _vote(_POS),
    _vote(_NEG, _NEU),
    _vote(_NEG, _POS),
    _vote(_NEU, _POS),
)

VOTE_PROFILES = ("unanimous", "tie", "mixed-winner", "random")


def gen_votes(
    profile: str, n_segments: int = 12, n_annotators: int = 4, seed: int = 0
) -> VoteTable:
    """Vote tables with known fusion outcomes.

    unanimous: all annotators agree, labels cycling over the pure three
    (alpha is exactly 1). tie: a 2-2 split everywhere (nothing survives).
    mixed-winner: a mixed ballot strictly wins everywhere (nothing
    survives). random: uniform over pure and two-label ballots.
    """
    if profile not in VOTE_PROFILES:
        raise ValueError(f"unknown profile {profile!r}")
    rng = np.random.default_rng(seed)
    votes: list[list[RawVote | None]] = []
    for i in range(n_segments):
        if profile == "unanimous":
            row = [_BALLOT_POOL[i % 3]] * n_annotators
        elif profile == "tie":
            half = n_annotators // 2
            row = [_vote(_NEG)] * half + [_vote(_POS)] * (n_annotators - half)
        elif profile == "mixed-winner":
            row = [_vote(_NEG, _POS)] * (n_annotators - 1) + [_vote(_NEU)]
        else:
            row = [_BALLOT_POOL[j] for j in rng.integers(0, len(_BALLOT_POOL), n_annotators)]
        votes.append(row)
    segment_ids = [f"synthtale__seg{i:03d}" for i in range(n_segments)]
    annotators = [f"annotator{j}" for j in range(n_annotators)]
    return VoteTable(segment_ids, annotators, votes)


def gen_classification(
    n: int, d: int, informative_feature: int = 0, noise_sd: float = 1.0, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Labels are thresholds (1/3, 2/3) on one uniform feature; the rest
    is Gaussian noise. noise_sd=0 keeps the noise columns identically 0."""
    if d < 1:
        raise ValueError("need at least one feature")
    if not 0 <= informative_feature < d:
        raise ValueError("informative_feature out of range")
    rng = np.random.default_rng(seed)
    signal = rng.uniform(0.0, 1.0, n)
    y = np.digitize(signal, (1.0 / 3.0, 2.0 / 3.0)).astype(int)
    X = rng.normal(0.0, 1.0, (n, d)) * noise_sd
    X[:, informative_feature] = signal
    return X, y


# --- oracles -----------------------------------------------------------


def oracle_mean_std(values) -> tuple[float, float]:
    """Definition-level mean and population std via explicit summation."""
    n = 0
    total = 0.0
    for v in values:
        total += float(v)
        n += 1
    mean = total / n
    sq = 0.0
    for v in values:
        sq += (float(v) - mean) ** 2
    return mean, math.sqrt(sq / n)


def oracle_accumulated_distance(xyz) -> float:
    total = 0.0
    prev = None
    for point in xyz:
        if prev is not None:
            total += math.sqrt(sum((float(a) - float(b)) ** 2 for a, b in zip(point, prev)))
        prev = point
    return total


def oracle_count_peaks(values) -> int:
    """Run-length scan: a run strictly above both neighbors is one peak."""
    runs: list[tuple[float, int]] = []
    for v in values:
        v = float(v)
        if runs and runs[-1][0] == v:
            runs[-1] = (v, runs[-1][1] + 1)
        else:
            runs.append((v, 1))
    count = 0
    for i in range(1, len(runs) - 1):
        if runs[i - 1][0] < runs[i][0] and runs[i][0] > runs[i + 1][0]:
            count += 1
    return count


def oracle_pair_distance(a, b) -> list[float]:
    return [
        math.sqrt(sum((float(u) - float(v)) ** 2 for u, v in zip(pa, pb)))
        for pa, pb in zip(a, b)
    ]


def oracle_majority(categories: list[str]) -> str | None:
    """Fusion rule restated from scratch on ballot category strings."""
    tallies: dict[str, int] = {}
    for c in categories:
        tallies[c] = tallies.get(c, 0) + 1
    top = max(tallies.values())
    winners = [c for c, n in tallies.items() if n == top]
    if len(winners) != 1:
        return None
    if "-" in winners[0]:
        return None
    return winners[0]


def oracle_alpha(units: list[list[str]]) -> float:
    """Pairwise-disagreement alpha for nominal data (O(n^2) everywhere)."""
    units = [u for u in units if len(u) >= 2]
    n = sum(len(u) for u in units)
    observed = 0.0
    for unit in units:
        du = 0.0
        for a in unit:
            for b in unit:
                if a != b:
                    du += 1.0
        observed += du / (len(unit) - 1)
    observed /= n
    flat = [c for unit in units for c in unit]
    expected = 0.0
    for i, a in enumerate(flat):
        for j, b in enumerate(flat):
            if i != j and a != b:
                expected += 1.0
    expected /= n * (n - 1)
    if expected == 0.0:
        return 1.0
    return 1.0 - observed / expected


def oracle_fold_divergence(
    fold_of_group: dict[str, int], group_counts: dict[str, np.ndarray], k: int
) -> float:
    """Total squared deviation of per-class fold counts from total_c / k."""
    n_classes = len(next(iter(group_counts.values())))
    totals = np.zeros(n_classes)
    for counts in group_counts.values():
        totals += counts
    ideal = totals / k
    folds = np.zeros((k, n_classes))
    for group, fold in fold_of_group.items():
        folds[fold] += group_counts[group]
    return float(((folds - ideal) ** 2).sum())


def oracle_best_divergence(group_counts: dict[str, np.ndarray], k: int) -> float:
    """Exhaustive minimum over all k^G group-to-fold assignments."""
    groups = sorted(group_counts)
    best = math.inf
    assignment = {}

    def recurse(i: int) -> None:
        nonlocal best
        if i == len(groups):
            best = min(best, oracle_fold_divergence(assignment, group_counts, k))
            return
        for fold in range(k):
            assignment[groups[i]] = fold
            recurse(i + 1)
        del assignment[groups[i]]

    recurse(0)
    return best
