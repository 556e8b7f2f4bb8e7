/**
 * Raw landmark channel catalog, version 1.
 *
 * This enumeration is the wire contract with the downstream pipeline: the
 * emitted CSV header must equal `signsense schema --raw` byte for byte.
 * A vendored copy of that output lives in fixtures/raw_header.txt and the
 * test suite checks all three stay in lockstep.
 */

export const CATALOG_VERSION = "1";

export const POSE_POINTS = [
  "pose_NOSE",
  "pose_LEFT_SHOULDER",
  "pose_RIGHT_SHOULDER",
  "pose_LEFT_ELBOW",
  "pose_RIGHT_ELBOW",
  "pose_LEFT_WRIST",
  "pose_RIGHT_WRIST",
  "pose_LEFT_HIP",
  "pose_RIGHT_HIP",
] as const;

export const HAND_POINTS = ["left_hand_WRIST", "right_hand_WRIST"] as const;

export const AXES = ["x", "y", "z"] as const;

export const BLENDSHAPES = [
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
] as const;

export const HEAD_TRANSFORM_CHANNELS = [
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
] as const;

function xyz(points: readonly string[]): string[] {
  return points.flatMap((p) => AXES.map((a) => `${p}_${a}`));
}

export const RAW_CHANNELS: readonly string[] = [
  ...xyz(POSE_POINTS),
  ...xyz(HAND_POINTS),
  ...BLENDSHAPES,
  ...HEAD_TRANSFORM_CHANNELS,
];

export const RAW_CHANNEL_COUNT = RAW_CHANNELS.length; // 97

export const RAW_INDEX: ReadonlyMap<string, number> = new Map(
  RAW_CHANNELS.map((name, i) => [name, i]),
);

/** Header row of the landmark CSV, no trailing newline. */
export function rawHeader(): string {
  return ["frame_index", ...RAW_CHANNELS].join(",");
}
