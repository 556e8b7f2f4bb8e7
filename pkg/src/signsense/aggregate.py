"""Collapse frame signals into one fixed-order feature vector per segment."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import catalog
from .ingest import FrameSeries, SchemaError
from .kinematics import DerivedSeries

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeatureVector:
    segment_id: str
    tale_id: str
    duration_s: float
    values: dict[str, float]  # insertion order == catalog.FEATURE_NAMES


def mean_std(signal: np.ndarray) -> tuple[float, float]:
    """Arithmetic mean and population (divide-by-F) standard deviation."""
    signal = np.asarray(signal, dtype=float)
    if signal.size == 0:
        raise ValueError("mean_std of an empty signal")
    return float(signal.mean()), float(signal.std())


def accumulated_distance(xyz: np.ndarray) -> float:
    """Total path length of an F x 3 trajectory."""
    xyz = np.asarray(xyz, dtype=float)
    if xyz.shape[0] < 2:
        logger.warning("accumulated_distance on <2 frames, reporting 0")
        return 0.0
    return float(np.linalg.norm(np.diff(xyz, axis=0), axis=1).sum())


def find_peak_indices(signal: np.ndarray) -> list[int]:
    """Strict local maxima; a plateau flanked by strictly smaller neighbors
    counts once, at its left-rounded midpoint. Endpoints never qualify."""
    x = np.asarray(signal, dtype=float)
    peaks: list[int] = []
    t = 1
    n = len(x)
    while t < n - 1:
        if x[t] > x[t - 1]:
            end = t
            while end + 1 < n and x[end + 1] == x[t]:
                end += 1
            if end < n - 1 and x[end + 1] < x[t]:
                peaks.append(t + (end - t) // 2)
            t = end + 1
        else:
            t += 1
    return peaks


def peaks_per_second(signal: np.ndarray, duration_s: float) -> float:
    if duration_s <= 0:
        raise ValueError("duration must be positive")
    if len(signal) < 3:
        return 0.0
    return len(find_peak_indices(signal)) / duration_s


def _safe(value: float, name: str, flags: list[str]) -> float:
    if not np.isfinite(value):
        flags.append(name)
        return 0.0
    return value


def assemble_vector(raw: FrameSeries, derived: DerivedSeries) -> FeatureVector:
    """Build the full per-segment feature vector in schema order.

    Mean and std for every raw and derived channel, peak rate for raw and
    distance channels, accumulated path length for the tracked points.
    Non-finite results degrade to 0 with a logged flag rather than
    poisoning the downstream matrix.
    """
    if derived.frame_count != raw.frame_count:
        raise SchemaError(
            f"{raw.segment_id}: derived frame count {derived.frame_count} "
            f"does not match raw {raw.frame_count}"
        )
    if derived.fps != raw.fps:
        raise SchemaError(f"{raw.segment_id}: fps mismatch between raw and derived")
    missing = [ch for ch in catalog.DERIVED_CHANNELS if ch not in derived.channels]
    if missing:
        raise SchemaError(f"{raw.segment_id}: derived channels missing: {missing}")

    duration = raw.duration_s
    flags: list[str] = []
    values: dict[str, float] = {}

    def put(name: str, value: float) -> None:
        values[name] = _safe(value, name, flags)

    for ch in catalog.RAW_CHANNELS:
        m, s = mean_std(raw.channel(ch))
        put(f"{ch}_mean", m)
        put(f"{ch}_std", s)
    for ch in catalog.DERIVED_CHANNELS:
        m, s = mean_std(derived.channels[ch])
        suffix = "avg" if ch in catalog.DISTANCE_CHANNELS else "mean"
        put(f"{ch}_{suffix}", m)
        put(f"{ch}_std", s)
    for ch in catalog.RAW_CHANNELS:
        put(f"{ch}_peaks_per_s", peaks_per_second(raw.channel(ch), duration))
    for ch in catalog.DISTANCE_CHANNELS:
        put(f"{ch}_peaks_per_s", peaks_per_second(derived.channels[ch], duration))
    for part, point in catalog.ACCUM_POINTS:
        put(f"{part}_accum_dist_avg", accumulated_distance(raw.point(point)))

    if flags:
        logger.warning("%s: %d non-finite features zeroed: %s",
                       raw.segment_id, len(flags), flags[:5])
    assert len(values) == catalog.FEATURE_COUNT
    return FeatureVector(raw.segment_id, raw.tale_id, duration, values)


def write_feature_matrix(vectors: list[FeatureVector], path: str | Path) -> None:
    """One row per segment: segment_id, tale_id, then schema-order features."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("segment_id,tale_id," + ",".join(catalog.FEATURE_NAMES) + "\n")
        for vec in vectors:
            cells = [vec.segment_id, vec.tale_id]
            cells.extend(repr(vec.values[name]) for name in catalog.FEATURE_NAMES)
            fh.write(",".join(cells) + "\n")


def read_feature_matrix(
    path: str | Path,
) -> tuple[list[str], list[str], list[str], np.ndarray]:
    """Returns (feature_names, segment_ids, tale_ids, X).

    The file is self-describing: any feature column set is accepted as
    long as the id columns lead, so reduced matrices stay readable.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = fh.readline().rstrip("\n").split(",")
        if header[:2] != ["segment_id", "tale_id"] or len(header) < 3:
            raise SchemaError(
                f"{path}: header must start with segment_id,tale_id,<feature...>"
            )
        names = header[2:]
        segment_ids: list[str] = []
        tale_ids: list[str] = []
        rows: list[list[float]] = []
        for line in fh:
            cells = line.rstrip("\n").split(",")
            if len(cells) != len(header):
                raise SchemaError(f"{path}: row width {len(cells)} != {len(header)}")
            segment_ids.append(cells[0])
            tale_ids.append(cells[1])
            rows.append([float(c) for c in cells[2:]])
    return names, segment_ids, tale_ids, np.asarray(rows, dtype=float)
