#!/usr/bin/env node
/**
 * signsense-extract: run a tracker over a video and emit the landmark CSV.
 *
 *   signsense-extract extract --video <path> --out <csv> [--fps <n>]
 *                             [--tracker stub|mediapipe]
 *                             [--wasm <dir>] [--holistic-model <path>]
 *                             [--face-model <path>]
 *                             [--tale <id>] [--segment <id>]
 *
 * `.frames.json` inputs default to the stub tracker, real videos to the
 * mediapipe tracker (which needs the wasm directory and both models).
 * Exit codes mirror the main pipeline: 0 ok, 1 runtime error, 2 usage.
 */

import { existsSync } from "node:fs";

import { isClipPath } from "./frames.js";
import { runExtraction } from "./extract.js";
import { StubTracker } from "./stubTracker.js";
import type { Tracker } from "./tracker.js";

const USAGE_ERROR = 2;
const RUNTIME_ERROR = 1;

class UsageError extends Error {}

interface CliArgs {
  video: string;
  out: string;
  fps?: number;
  tracker: "stub" | "mediapipe";
  wasm?: string;
  holisticModel?: string;
  faceModel?: string;
  tale?: string;
  segment?: string;
}

function parseArgs(argv: string[]): CliArgs {
  if (argv[0] !== "extract") {
    throw new UsageError("expected the 'extract' subcommand");
  }
  const values = new Map<string, string>();
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i];
    if (!flag.startsWith("--") || i + 1 >= argv.length) {
      throw new UsageError(`malformed arguments near ${flag}`);
    }
    values.set(flag.slice(2), argv[i + 1]);
  }
  const video = values.get("video");
  const out = values.get("out");
  if (!video || !out) {
    throw new UsageError("--video and --out are required");
  }
  let fps: number | undefined;
  if (values.has("fps")) {
    fps = Number(values.get("fps"));
    if (!(fps > 0)) {
      throw new UsageError("--fps must be a positive number");
    }
  }
  const tracker = values.get("tracker") ?? (isClipPath(video) ? "stub" : "mediapipe");
  if (tracker !== "stub" && tracker !== "mediapipe") {
    throw new UsageError(`unknown tracker ${tracker}`);
  }
  return {
    video,
    out,
    fps,
    tracker,
    wasm: values.get("wasm"),
    holisticModel: values.get("holistic-model"),
    faceModel: values.get("face-model"),
    tale: values.get("tale"),
    segment: values.get("segment"),
  };
}

async function buildTracker(args: CliArgs): Promise<Tracker> {
  if (args.tracker === "stub") {
    return new StubTracker();
  }
  if (!args.wasm || !args.holisticModel || !args.faceModel) {
    throw new UsageError(
      "the mediapipe tracker needs --wasm, --holistic-model and --face-model",
    );
  }
  // Loaded lazily so stub-only environments never touch the wasm runtime.
  const { MediapipeTracker } = await import("./mediapipeTracker.js");
  return MediapipeTracker.create({
    wasmBase: args.wasm,
    holisticModel: args.holisticModel,
    faceModel: args.faceModel,
  });
}

export async function main(argv: string[]): Promise<number> {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`signsense-extract: ${(err as Error).message}`);
    return USAGE_ERROR;
  }
  if (!existsSync(args.video)) {
    console.error(`signsense-extract: video not found: ${args.video}`);
    return USAGE_ERROR;
  }
  let tracker: Tracker | undefined;
  try {
    tracker = await buildTracker(args);
    const summary = await runExtraction(
      {
        videoPath: args.video,
        outPath: args.out,
        fpsOverride: args.fps,
        taleId: args.tale,
        segmentId: args.segment,
      },
      tracker,
    );
    console.log(
      `wrote ${summary.frames} frames to ${args.out} ` +
        `(${summary.detectedFrames} with detections)`,
    );
    return 0;
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`signsense-extract: ${err.message}`);
      return USAGE_ERROR;
    }
    console.error(`signsense-extract: ${(err as Error).message}`);
    return RUNTIME_ERROR;
  } finally {
    await tracker?.close();
  }
}

const isDirectRun = process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (isDirectRun) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
