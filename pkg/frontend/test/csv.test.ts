import assert from "node:assert/strict";
import test from "node:test";

import { RAW_CHANNELS, RAW_INDEX } from "../src/catalog.js";
import { observationCells, renderCsv } from "../src/csv.js";
import type { FrameObservation } from "../src/tracker.js";

const FULL_OBSERVATION: FrameObservation = {
  pose: Object.fromEntries(
    [
      "pose_NOSE", "pose_LEFT_SHOULDER", "pose_RIGHT_SHOULDER",
      "pose_LEFT_ELBOW", "pose_RIGHT_ELBOW", "pose_LEFT_WRIST",
      "pose_RIGHT_WRIST", "pose_LEFT_HIP", "pose_RIGHT_HIP",
    ].map((name, i) => [name, { x: i, y: i + 0.5, z: -i }]),
  ),
  leftHandWrist: { x: 1, y: 2, z: 3 },
  rightHandWrist: { x: 4, y: 5, z: 6 },
  blendshapes: Object.fromEntries(
    RAW_CHANNELS.filter((c) => !c.includes("_")).map((c) => [c, 0.25]),
  ),
  headTransform: [
    1, 0, 0, 0.1,
    0, 1, 0, 0.2,
    0, 0, 1, 0.3,
    0, 0, 0, 1,
  ],
};

test("empty observation renders all cells missing", () => {
  const cells = observationCells({});
  assert.equal(cells.length, RAW_CHANNELS.length);
  assert.ok(cells.every((c) => c === null));
});

test("head transform maps rotation rows then translation", () => {
  const cells = observationCells(FULL_OBSERVATION);
  assert.equal(cells[RAW_INDEX.get("head_transform_r00")!], 1);
  assert.equal(cells[RAW_INDEX.get("head_transform_r11")!], 1);
  assert.equal(cells[RAW_INDEX.get("head_transform_t0")!], 0.1);
  assert.equal(cells[RAW_INDEX.get("head_transform_t1")!], 0.2);
  assert.equal(cells[RAW_INDEX.get("head_transform_t2")!], 0.3);
});

test("pose and hand cells land on their channels", () => {
  const cells = observationCells(FULL_OBSERVATION);
  assert.equal(cells[RAW_INDEX.get("pose_NOSE_x")!], 0);
  assert.equal(cells[RAW_INDEX.get("pose_NOSE_y")!], 0.5);
  assert.equal(cells[RAW_INDEX.get("pose_RIGHT_HIP_z")!], -8);
  assert.equal(cells[RAW_INDEX.get("left_hand_WRIST_y")!], 2);
  assert.equal(cells[RAW_INDEX.get("right_hand_WRIST_z")!], 6);
});

test("renderCsv emits metadata, header, and one row per frame", () => {
  const text = renderCsv(
    { fps: 30, taleId: "tale0", segmentId: "tale0__seg001" },
    [{}, FULL_OBSERVATION, {}],
  );
  const lines = text.split("\n");
  assert.equal(lines[0], "# fps=30 tale=tale0 segment=tale0__seg001");
  assert.ok(lines[1].startsWith("frame_index,pose_NOSE_x,"));
  assert.equal(lines.length, 2 + 3 + 1); // meta + header + rows + final newline
  assert.equal(lines[2], "0," + ",".repeat(RAW_CHANNELS.length - 1));
  assert.ok(lines[3].startsWith("1,0,0.5,"));
});

test("partial detections leave only the missing cells empty", () => {
  const partial: FrameObservation = { pose: { pose_NOSE: { x: 7, y: 8, z: 9 } } };
  const cells = observationCells(partial);
  assert.equal(cells[RAW_INDEX.get("pose_NOSE_x")!], 7);
  assert.equal(cells[RAW_INDEX.get("pose_LEFT_SHOULDER_x")!], null);
  assert.equal(cells[RAW_INDEX.get("mouthSmileRight")!], null);
});

test("non-finite values are rejected", () => {
  assert.throws(() =>
    renderCsv({ fps: 30, taleId: "t", segmentId: "s" }, [
      { leftHandWrist: { x: Number.NaN, y: 0, z: 0 } },
    ]),
  );
});
