/**
 * Landmark CSV writer.
 *
 * One row per frame, header straight from the catalog, a `# fps=...`
 * metadata line first. Undetected values stay empty: the adapter never
 * invents or interpolates data, repair belongs to the consumer.
 */

import { AXES, HAND_POINTS, POSE_POINTS, BLENDSHAPES, HEAD_TRANSFORM_CHANNELS, RAW_CHANNELS, rawHeader } from "./catalog.js";
import type { FrameObservation } from "./tracker.js";

export interface SegmentMeta {
  fps: number;
  taleId: string;
  segmentId: string;
}

function formatValue(value: number): string {
  if (!Number.isFinite(value)) {
    throw new Error(`non-finite landmark value: ${value}`);
  }
  return String(value);
}

/** Flatten one observation into catalog order; null = missing cell. */
export function observationCells(obs: FrameObservation): (number | null)[] {
  const cells = new Array<number | null>(RAW_CHANNELS.length).fill(null);
  let col = 0;
  for (const point of POSE_POINTS) {
    const p = obs.pose?.[point];
    for (const axis of AXES) {
      cells[col++] = p ? p[axis] : null;
    }
  }
  for (const point of HAND_POINTS) {
    const p = point === "left_hand_WRIST" ? obs.leftHandWrist : obs.rightHandWrist;
    for (const axis of AXES) {
      cells[col++] = p ? p[axis] : null;
    }
  }
  for (const name of BLENDSHAPES) {
    const value = obs.blendshapes?.[name];
    cells[col++] = value === undefined ? null : value;
  }
  if (obs.headTransform !== undefined) {
    if (obs.headTransform.length !== 16) {
      throw new Error(`head transform must have 16 entries, got ${obs.headTransform.length}`);
    }
    const m = obs.headTransform;
    // Row-major 4x4: rotation rows 0-2 cols 0-2, translation col 3.
    const values = [
      m[0], m[1], m[2],
      m[4], m[5], m[6],
      m[8], m[9], m[10],
      m[3], m[7], m[11],
    ];
    for (const v of values) {
      cells[col++] = v;
    }
  } else {
    col += HEAD_TRANSFORM_CHANNELS.length;
  }
  return cells;
}

export function renderCsv(meta: SegmentMeta, observations: FrameObservation[]): string {
  const lines: string[] = [];
  lines.push(`# fps=${meta.fps} tale=${meta.taleId} segment=${meta.segmentId}`);
  lines.push(rawHeader());
  observations.forEach((obs, index) => {
    const cells = observationCells(obs).map((v) => (v === null ? "" : formatValue(v)));
    lines.push([String(index), ...cells].join(","));
  });
  return lines.join("\n") + "\n";
}
