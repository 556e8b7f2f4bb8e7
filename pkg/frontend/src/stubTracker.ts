/**
 * Deterministic tracker for tests and offline runs.
 *
 * Emits a plausible signing body whenever a frame has any brightness and
 * reports nothing on (near-)black frames, which is how real detectors
 * behave on empty video. Everything is a pure function of the frame
 * timestamp, so extractions are reproducible.
 */

import { BLENDSHAPES } from "./catalog.js";
import type { FrameObservation, Point3, Tracker, VideoFrame } from "./tracker.js";

const DARK_LUMA_THRESHOLD = 0.05;

const BASE_POSE: Record<string, Point3> = {
  pose_NOSE: { x: 0.5, y: 1.5, z: 0.0 },
  pose_LEFT_SHOULDER: { x: 0.3, y: 1.3, z: 0.0 },
  pose_RIGHT_SHOULDER: { x: 0.7, y: 1.3, z: 0.0 },
  pose_LEFT_ELBOW: { x: 0.2, y: 1.05, z: 0.05 },
  pose_RIGHT_ELBOW: { x: 0.8, y: 1.05, z: 0.05 },
  pose_LEFT_WRIST: { x: 0.25, y: 0.85, z: 0.1 },
  pose_RIGHT_WRIST: { x: 0.75, y: 0.85, z: 0.1 },
  pose_LEFT_HIP: { x: 0.38, y: 0.9, z: 0.0 },
  pose_RIGHT_HIP: { x: 0.62, y: 0.9, z: 0.0 },
};

function meanLuma(frame: VideoFrame): number {
  const { data } = frame;
  let total = 0;
  const pixels = data.length / 4;
  for (let i = 0; i < data.length; i += 4) {
    total += 0.2126 * data[i] + 0.7152 * data[i + 1] + 0.0722 * data[i + 2];
  }
  return total / (pixels * 255);
}

export class StubTracker implements Tracker {
  async observe(frame: VideoFrame): Promise<FrameObservation> {
    if (meanLuma(frame) < DARK_LUMA_THRESHOLD) {
      return {};
    }
    const t = frame.timestampMs / 1000;
    const sway = 0.05 * Math.sin(2 * Math.PI * t);
    const pose: Record<string, Point3> = {};
    for (const [name, p] of Object.entries(BASE_POSE)) {
      pose[name] = { x: p.x + (name.includes("WRIST") ? sway : 0), y: p.y, z: p.z };
    }
    const blendshapes: Record<string, number> = {};
    for (const name of BLENDSHAPES) {
      blendshapes[name] = 0.1;
    }
    blendshapes["mouthSmileRight"] = 0.4 + 0.2 * Math.sin(2 * Math.PI * t);
    blendshapes["mouthSmileLeft"] = 0.4 + 0.2 * Math.sin(2 * Math.PI * t);
    return {
      pose,
      leftHandWrist: pose["pose_LEFT_WRIST"],
      rightHandWrist: pose["pose_RIGHT_WRIST"],
      blendshapes,
      // Identity rotation, small nodding translation.
      headTransform: [
        1, 0, 0, 0,
        0, 1, 0, 0.02 * Math.sin(2 * Math.PI * t),
        0, 0, 1, 0,
        0, 0, 0, 1,
      ],
    };
  }

  async close(): Promise<void> {}
}
