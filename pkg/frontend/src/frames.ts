/**
 * Frame sources: either a real video decoded through ffmpeg, or a
 * synthetic `.frames.json` clip used by tests and offline development.
 *
 * Clip format:
 *   { "format": "signsense-frames", "fps": 25,
 *     "width": 64, "height": 64, "frames": [{"luma": 0.5}, ...] }
 *
 * Each synthetic frame is rendered as a uniform gray image of the given
 * luminance, which is all the stub tracker needs to decide whether a
 * body is visible.
 */

import { spawn } from "node:child_process";
import { readFileSync } from "node:fs";

import type { VideoFrame } from "./tracker.js";

export interface FrameSource {
  fps: number;
  frames(): AsyncGenerator<VideoFrame>;
}

interface ClipFile {
  format: string;
  fps: number;
  width: number;
  height: number;
  frames: { luma: number }[];
}

export const CLIP_SUFFIX = ".frames.json";

export function isClipPath(path: string): boolean {
  return path.endsWith(CLIP_SUFFIX);
}

export function openClip(path: string, fpsOverride?: number): FrameSource {
  const parsed = JSON.parse(readFileSync(path, "utf-8")) as ClipFile;
  if (parsed.format !== "signsense-frames") {
    throw new Error(`${path}: not a signsense-frames clip`);
  }
  if (!Array.isArray(parsed.frames) || parsed.frames.length === 0) {
    throw new Error(`${path}: clip has no frames`);
  }
  const fps = fpsOverride ?? parsed.fps;
  if (!(fps > 0)) {
    throw new Error(`${path}: fps must be positive`);
  }
  const { width, height } = parsed;
  return {
    fps,
    async *frames() {
      for (let i = 0; i < parsed.frames.length; i++) {
        const value = Math.round(255 * Math.min(1, Math.max(0, parsed.frames[i].luma)));
        const data = new Uint8ClampedArray(width * height * 4);
        for (let p = 0; p < data.length; p += 4) {
          data[p] = data[p + 1] = data[p + 2] = value;
          data[p + 3] = 255;
        }
        yield { data, width, height, timestampMs: (i * 1000) / fps };
      }
    },
  };
}

async function probeVideo(path: string): Promise<{ width: number; height: number; fps: number }> {
  const args = [
    "-v", "error",
    "-select_streams", "v:0",
    "-show_entries", "stream=width,height,r_frame_rate",
    "-of", "json",
    path,
  ];
  const out = await runCapture("ffprobe", args);
  const info = JSON.parse(out).streams?.[0];
  if (!info) {
    throw new Error(`${path}: no video stream found`);
  }
  const [num, den] = String(info.r_frame_rate).split("/").map(Number);
  return { width: info.width, height: info.height, fps: num / (den || 1) };
}

function runCapture(command: string, args: string[]): Promise<string> {
  return new Promise((resolve, reject) => {
    const child = spawn(command, args, { stdio: ["ignore", "pipe", "pipe"] });
    let stdout = "";
    let stderr = "";
    child.stdout.on("data", (chunk) => (stdout += chunk));
    child.stderr.on("data", (chunk) => (stderr += chunk));
    child.on("error", (err) => reject(new Error(`${command} failed to start: ${err.message}`)));
    child.on("close", (code) => {
      if (code === 0) resolve(stdout);
      else reject(new Error(`${command} exited ${code}: ${stderr.trim()}`));
    });
  });
}

export async function openVideo(path: string, fpsOverride?: number): Promise<FrameSource> {
  const { width, height, fps: nativeFps } = await probeVideo(path);
  const fps = fpsOverride ?? nativeFps;
  const frameBytes = width * height * 4;
  return {
    fps,
    async *frames() {
      const child = spawn(
        "ffmpeg",
        ["-v", "error", "-i", path, "-f", "rawvideo", "-pix_fmt", "rgba", "pipe:1"],
        { stdio: ["ignore", "pipe", "inherit"] },
      );
      let pending: Buffer = Buffer.alloc(0);
      let index = 0;
      for await (const chunk of child.stdout) {
        pending = Buffer.concat([pending, chunk as Buffer]);
        while (pending.length >= frameBytes) {
          const raw = pending.subarray(0, frameBytes);
          pending = pending.subarray(frameBytes);
          yield {
            data: new Uint8ClampedArray(raw),
            width,
            height,
            timestampMs: (index * 1000) / fps,
          };
          index += 1;
        }
      }
      if (pending.length !== 0) {
        throw new Error(`${path}: truncated frame (${pending.length} leftover bytes)`);
      }
    },
  };
}

export async function openSource(path: string, fpsOverride?: number): Promise<FrameSource> {
  return isClipPath(path) ? openClip(path, fpsOverride) : openVideo(path, fpsOverride);
}
