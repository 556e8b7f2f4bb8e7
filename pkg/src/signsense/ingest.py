"""Landmark CSV parsing, validation, and gap repair.

Canonical landmark file layout:

    # fps=50 tale=hare segment=hare__seg000
    frame_index,pose_NOSE_x,...,head_transform_t2
    0,0.51,...,0.02
    1,,...,0.02          <- empty cell = missing sample

The first line is a metadata comment carrying the frame rate (mandatory)
plus optional tale/segment ids; missing ids fall back to the file name.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import catalog

logger = logging.getLogger(__name__)


class SchemaError(ValueError):
    """Header does not match the channel catalog."""


class ParseError(ValueError):
    """A cell could not be read as a number."""


class DegenerateInputError(ValueError):
    """Input too short to process (fewer than 2 frames)."""


@dataclass(frozen=True)
class FrameSeries:
    """Per-segment multichannel time series with a validity mask.

    frames is F x C float64 (C = catalog raw channel count); valid marks
    which cells held actual samples. Invalid cells hold 0.0 until repaired.
    """

    segment_id: str
    tale_id: str
    fps: float
    frames: np.ndarray
    valid: np.ndarray

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]

    @property
    def duration_s(self) -> float:
        return self.frames.shape[0] / self.fps

    def channel(self, name: str) -> np.ndarray:
        return self.frames[:, catalog.RAW_INDEX[name]]

    def point(self, base: str) -> np.ndarray:
        """F x 3 view of an xyz point such as ``pose_LEFT_WRIST``."""
        i = catalog.RAW_INDEX[f"{base}_x"]
        return self.frames[:, i : i + 3]


@dataclass
class DegeneracyReport:
    """Per-segment data-quality findings; report-only, never fatal."""

    segment_id: str
    entries: list[tuple[str, str]] = field(default_factory=list)

    def add(self, channel: str, issue: str) -> None:
        self.entries.append((channel, issue))

    def __bool__(self) -> bool:
        return bool(self.entries)

    def lines(self) -> list[str]:
        return [f"{self.segment_id},{ch},{issue}" for ch, issue in self.entries]


def _parse_meta_line(line: str, path: Path) -> tuple[float, str, str]:
    if not line.startswith("#"):
        raise SchemaError(f"{path}: first line must be a '# fps=...' metadata comment")
    stem = path.stem
    fps = None
    tale = stem.split("__", 1)[0]
    segment = stem
    for token in line.lstrip("#").split():
        if "=" not in token:
            continue
        key, value = token.split("=", 1)
        if key == "fps":
            try:
                fps = float(value)
            except ValueError:
                raise SchemaError(f"{path}: unreadable fps value {value!r}") from None
        elif key == "tale":
            tale = value
        elif key == "segment":
            segment = value
    if fps is None or fps <= 0:
        raise SchemaError(f"{path}: metadata line must declare a positive fps")
    return fps, tale, segment


def _check_header(header: str, path: Path) -> None:
    got = header.rstrip("\n").split(",")
    want = ["frame_index", *catalog.RAW_CHANNELS]
    for i, name in enumerate(want):
        if i >= len(got) or got[i] != name:
            found = got[i] if i < len(got) else "<end of header>"
            raise SchemaError(
                f"{path}: header column {i} should be {name!r}, found {found!r}"
            )
    if len(got) > len(want):
        raise SchemaError(f"{path}: unexpected extra column {got[len(want)]!r}")


def parse_landmark_file(path: str | Path) -> FrameSeries:
    """Read one canonical landmark CSV into a FrameSeries.

    Empty cells become invalid entries in the mask; any other non-numeric
    cell is a ParseError. Files with fewer than 2 frames are rejected.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        meta = fh.readline()
        fps, tale_id, segment_id = _parse_meta_line(meta, path)
        _check_header(fh.readline(), path)
        rows: list[list[str]] = []
        for raw in fh:
            raw = raw.rstrip("\n").rstrip("\r")
            if raw:
                rows.append(raw.split(","))

    n_cols = 1 + catalog.RAW_CHANNEL_COUNT
    frame_count = len(rows)
    if frame_count < 2:
        raise DegenerateInputError(f"{path}: needs at least 2 frames, has {frame_count}")

    frames = np.zeros((frame_count, catalog.RAW_CHANNEL_COUNT))
    valid = np.zeros((frame_count, catalog.RAW_CHANNEL_COUNT), dtype=bool)
    for r, cells in enumerate(rows):
        if len(cells) != n_cols:
            raise ParseError(f"{path}: row {r} has {len(cells)} cells, expected {n_cols}")
        for c, cell in enumerate(cells[1:]):
            if cell == "":
                continue
            try:
                frames[r, c] = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: row {r}, column {catalog.RAW_CHANNELS[c]!r}: "
                    f"cannot parse {cell!r}"
                ) from None
            valid[r, c] = True
    return FrameSeries(segment_id, tale_id, fps, frames, valid)


def write_landmark_file(series: FrameSeries, path: str | Path) -> None:
    """Write a FrameSeries back to the canonical CSV layout."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# fps={series.fps:g} tale={series.tale_id} segment={series.segment_id}\n")
        fh.write(catalog.raw_header() + "\n")
        for r in range(series.frame_count):
            cells = [str(r)]
            for c in range(catalog.RAW_CHANNEL_COUNT):
                cells.append(repr(float(series.frames[r, c])) if series.valid[r, c] else "")
            fh.write(",".join(cells) + "\n")


def interpolate_gaps(series: FrameSeries) -> FrameSeries:
    """Fill missing cells per channel: linear inside, hold at the edges.

    Interior gaps are interpolated linearly against the frame index;
    leading/trailing gaps repeat the nearest valid value (extrapolation
    would fabricate velocities). A channel with no valid frame at all is
    zero-filled and logged. Valid cells are returned bit-identical, so the
    operation is idempotent.
    """
    frames = series.frames.copy()
    valid = series.valid
    idx = np.arange(series.frame_count, dtype=float)
    for c in range(frames.shape[1]):
        mask = valid[:, c]
        if mask.all():
            continue
        if not mask.any():
            frames[:, c] = 0.0
            logger.warning(
                "%s: channel %s has no valid samples, zero-filled",
                series.segment_id,
                catalog.RAW_CHANNELS[c],
            )
            continue
        known = np.flatnonzero(mask)
        # np.interp holds the boundary values outside [first, last] valid index.
        frames[~mask, c] = np.interp(idx[~mask], idx[known], frames[known, c])
    return FrameSeries(
        series.segment_id,
        series.tale_id,
        series.fps,
        frames,
        np.ones_like(valid),
    )


def validate_series(series: FrameSeries) -> DegeneracyReport:
    """Report all-missing channels, out-of-range blendshapes, NaN cells."""
    report = DegeneracyReport(series.segment_id)
    for c, name in enumerate(catalog.RAW_CHANNELS):
        mask = series.valid[:, c]
        if not mask.any():
            report.add(name, "all-missing")
            continue
        col = series.frames[mask, c]
        n_nan = int(np.isnan(col).sum())
        if n_nan:
            report.add(name, f"nan-cells={n_nan}")
    for c in catalog.BLENDSHAPE_INDICES:
        mask = series.valid[:, c]
        if not mask.any():
            continue
        col = series.frames[mask, c]
        bad = int(((col < 0.0) | (col > 1.0)).sum())
        if bad:
            report.add(catalog.RAW_CHANNELS[c], f"blendshape-out-of-range={bad}")
    return report
