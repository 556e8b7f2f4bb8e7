/** Extraction job: frame source -> tracker -> landmark CSV on disk. */

import { mkdirSync, renameSync, writeFileSync } from "node:fs";
import { basename, dirname } from "node:path";

import { renderCsv } from "./csv.js";
import { openSource } from "./frames.js";
import type { FrameObservation, Tracker } from "./tracker.js";

export interface ExtractionJob {
  videoPath: string;
  outPath: string;
  fpsOverride?: number;
  taleId?: string;
  segmentId?: string;
}

export interface ExtractionSummary {
  frames: number;
  detectedFrames: number;
}

function idsFromOutPath(outPath: string): { taleId: string; segmentId: string } {
  const stem = basename(outPath).replace(/\.csv$/, "");
  const taleId = stem.includes("__") ? stem.split("__", 1)[0] : stem;
  return { taleId, segmentId: stem };
}

export async function runExtraction(
  job: ExtractionJob,
  tracker: Tracker,
): Promise<ExtractionSummary> {
  const source = await openSource(job.videoPath, job.fpsOverride);
  const observations: FrameObservation[] = [];
  let detected = 0;
  for await (const frame of source.frames()) {
    const obs = await tracker.observe(frame);
    if (Object.keys(obs).length > 0) {
      detected += 1;
    }
    observations.push(obs);
  }
  const fallback = idsFromOutPath(job.outPath);
  const text = renderCsv(
    {
      fps: source.fps,
      taleId: job.taleId ?? fallback.taleId,
      segmentId: job.segmentId ?? fallback.segmentId,
    },
    observations,
  );
  mkdirSync(dirname(job.outPath) || ".", { recursive: true });
  const tmp = job.outPath + ".part";
  writeFileSync(tmp, text, "utf-8");
  renameSync(tmp, job.outPath);
  return { frames: observations.length, detectedFrames: detected };
}
