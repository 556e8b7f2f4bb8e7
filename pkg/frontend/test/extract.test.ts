import assert from "node:assert/strict";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import test from "node:test";
import { fileURLToPath } from "node:url";

import { rawHeader } from "../src/catalog.js";
import { main } from "../src/cli.js";
import { openClip } from "../src/frames.js";
import { runExtraction } from "../src/extract.js";
import { StubTracker } from "../src/stubTracker.js";

const here = dirname(fileURLToPath(import.meta.url));
const fixtures = join(here, "..", "..", "fixtures");
const testClip = join(fixtures, "testclip.frames.json");
const blackClip = join(fixtures, "blackclip.frames.json");

function tempOut(name: string): string {
  return join(mkdtempSync(join(tmpdir(), "extract-")), name);
}

test("ten-frame clip produces ten rows with detections", async () => {
  const out = tempOut("tale0__seg000.csv");
  const summary = await runExtraction(
    { videoPath: testClip, outPath: out },
    new StubTracker(),
  );
  assert.equal(summary.frames, 10);
  assert.equal(summary.detectedFrames, 10);
  const lines = readFileSync(out, "utf-8").trimEnd().split("\n");
  assert.equal(lines.length, 2 + 10);
  assert.equal(lines[0], "# fps=25 tale=tale0 segment=tale0__seg000");
  assert.equal(lines[1], rawHeader());
  assert.ok(!lines[2].includes(",,"), "visible frames must have no missing cells");
});

test("black clip emits all-missing landmark cells", async () => {
  const out = tempOut("dark__seg000.csv");
  const summary = await runExtraction(
    { videoPath: blackClip, outPath: out },
    new StubTracker(),
  );
  assert.equal(summary.detectedFrames, 0);
  const lines = readFileSync(out, "utf-8").trimEnd().split("\n");
  for (const line of lines.slice(2)) {
    const [index, ...cells] = line.split(",");
    assert.match(index, /^\d+$/);
    assert.ok(cells.every((c) => c === ""), "expected every cell empty");
  }
});

test("fps override lands in the metadata line", async () => {
  const out = tempOut("tale0__seg001.csv");
  await runExtraction(
    { videoPath: testClip, outPath: out, fpsOverride: 50 },
    new StubTracker(),
  );
  assert.ok(readFileSync(out, "utf-8").startsWith("# fps=50 "));
});

test("clip loader validates format and frame count", () => {
  assert.throws(() => openClip(join(fixtures, "raw_header.txt")));
});

test("cli: happy path exit 0", async () => {
  const out = tempOut("tale0__seg002.csv");
  const code = await main(["extract", "--video", testClip, "--out", out]);
  assert.equal(code, 0);
  assert.equal(readFileSync(out, "utf-8").split("\n")[1], rawHeader());
});

test("cli: missing video is a usage error", async () => {
  const code = await main([
    "extract", "--video", "/no/such/clip.frames.json", "--out", tempOut("x.csv"),
  ]);
  assert.equal(code, 2);
});

test("cli: bad flags are usage errors", async () => {
  assert.equal(await main(["extract", "--video", testClip]), 2);
  assert.equal(await main(["nonsense"]), 2);
  assert.equal(
    await main(["extract", "--video", testClip, "--out", tempOut("y.csv"),
                "--fps", "-3"]),
    2,
  );
});

test("cli: mediapipe tracker without model paths is a usage error", async () => {
  const code = await main([
    "extract", "--video", testClip, "--out", tempOut("z.csv"),
    "--tracker", "mediapipe",
  ]);
  assert.equal(code, 2);
});

test("extraction is deterministic", async () => {
  const out1 = tempOut("a.csv");
  const out2 = tempOut("b.csv");
  await runExtraction(
    { videoPath: testClip, outPath: out1, segmentId: "s", taleId: "t" },
    new StubTracker(),
  );
  await runExtraction(
    { videoPath: testClip, outPath: out2, segmentId: "s", taleId: "t" },
    new StubTracker(),
  );
  assert.equal(readFileSync(out1, "utf-8"), readFileSync(out2, "utf-8"));
});
