/** Tracker-facing types shared by the real and stub backends. */

export interface Point3 {
  x: number;
  y: number;
  z: number;
}

/**
 * Everything a tracker can say about one frame. Absent parts mean the
 * detector found nothing; the writer turns them into empty CSV cells.
 * Repair (interpolation) is deliberately not our job - the downstream
 * pipeline owns it.
 */
export interface FrameObservation {
  pose?: Partial<Record<string, Point3>>; // key = pose point name
  leftHandWrist?: Point3;
  rightHandWrist?: Point3;
  blendshapes?: Partial<Record<string, number>>;
  /** Row-major 4x4 head transform (length 16). */
  headTransform?: readonly number[];
}

export interface VideoFrame {
  /** RGBA pixels, row-major. */
  data: Uint8ClampedArray;
  width: number;
  height: number;
  /** Presentation time in milliseconds. */
  timestampMs: number;
}

export interface Tracker {
  observe(frame: VideoFrame): Promise<FrameObservation>;
  close(): Promise<void>;
}
