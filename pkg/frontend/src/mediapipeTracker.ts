/**
 * Real tracking backend: HolisticLandmarker for pose and hand wrists,
 * FaceLandmarker for the 52 blendshapes and the 4x4 head transform.
 *
 * Needs the wasm runtime and both .task model bundles on disk (or a URL
 * the runtime can fetch); pass their locations in ModelPaths. World
 * (metric) landmarks are emitted so trajectories are consistent in 3D.
 */

import {
  FaceLandmarker,
  FilesetResolver,
  HolisticLandmarker,
  type HolisticLandmarkerResult,
  type Landmark,
} from "@mediapipe/tasks-vision";

import type { FrameObservation, Point3, Tracker, VideoFrame } from "./tracker.js";

export interface ModelPaths {
  /** Directory (or URL base) holding the tasks-vision wasm files. */
  wasmBase: string;
  holisticModel: string;
  faceModel: string;
}

// Indices into the 33-point pose landmark list.
const POSE_LANDMARK_INDEX: Record<string, number> = {
  pose_NOSE: 0,
  pose_LEFT_SHOULDER: 11,
  pose_RIGHT_SHOULDER: 12,
  pose_LEFT_ELBOW: 13,
  pose_RIGHT_ELBOW: 14,
  pose_LEFT_WRIST: 15,
  pose_RIGHT_WRIST: 16,
  pose_LEFT_HIP: 23,
  pose_RIGHT_HIP: 24,
};

const HAND_WRIST_INDEX = 0;

function asPoint(landmark: Landmark): Point3 {
  return { x: landmark.x, y: landmark.y, z: landmark.z };
}

function toImageData(frame: VideoFrame): ImageData {
  // The wasm runtime consumes anything ImageData-shaped.
  return {
    data: frame.data,
    width: frame.width,
    height: frame.height,
    colorSpace: "srgb",
  } as ImageData;
}

export class MediapipeTracker implements Tracker {
  private constructor(
    private readonly holistic: HolisticLandmarker,
    private readonly face: FaceLandmarker,
  ) {}

  static async create(paths: ModelPaths): Promise<MediapipeTracker> {
    const fileset = await FilesetResolver.forVisionTasks(paths.wasmBase);
    const holistic = await HolisticLandmarker.createFromOptions(fileset, {
      baseOptions: { modelAssetPath: paths.holisticModel },
      runningMode: "VIDEO",
    });
    const face = await FaceLandmarker.createFromOptions(fileset, {
      baseOptions: { modelAssetPath: paths.faceModel },
      runningMode: "VIDEO",
      numFaces: 1,
      outputFaceBlendshapes: true,
      outputFacialTransformationMatrixes: true,
    });
    return new MediapipeTracker(holistic, face);
  }

  async observe(frame: VideoFrame): Promise<FrameObservation> {
    const image = toImageData(frame);
    const body: HolisticLandmarkerResult = this.holistic.detectForVideo(
      image,
      frame.timestampMs,
    );
    const faceResult = this.face.detectForVideo(image, frame.timestampMs);

    const observation: FrameObservation = {};
    const worldPose = body.poseWorldLandmarks[0];
    if (worldPose !== undefined) {
      const pose: Partial<Record<string, Point3>> = {};
      for (const [name, index] of Object.entries(POSE_LANDMARK_INDEX)) {
        const landmark = worldPose[index];
        if (landmark !== undefined) {
          pose[name] = asPoint(landmark);
        }
      }
      observation.pose = pose;
    }
    const leftHand = body.leftHandWorldLandmarks[0];
    if (leftHand?.[HAND_WRIST_INDEX] !== undefined) {
      observation.leftHandWrist = asPoint(leftHand[HAND_WRIST_INDEX]);
    }
    const rightHand = body.rightHandWorldLandmarks[0];
    if (rightHand?.[HAND_WRIST_INDEX] !== undefined) {
      observation.rightHandWrist = asPoint(rightHand[HAND_WRIST_INDEX]);
    }

    const categories = faceResult.faceBlendshapes[0]?.categories;
    if (categories !== undefined) {
      const blendshapes: Partial<Record<string, number>> = {};
      for (const category of categories) {
        blendshapes[category.categoryName] = category.score;
      }
      observation.blendshapes = blendshapes;
    }
    const matrix = faceResult.facialTransformationMatrixes[0];
    if (matrix !== undefined && matrix.rows === 4 && matrix.columns === 4) {
      observation.headTransform = [...matrix.data];
    }
    return observation;
  }

  async close(): Promise<void> {
    this.holistic.close();
    this.face.close();
  }
}
