/** Wire formats of the resolver service, mirrored field for field. */

export interface UserPose {
  head_position: [number, number, number];
  forward: [number, number];
}

export interface SceneObject {
  id: string;
  position: [number, number, number];
  name: string;
  color: string;
  shape: string;
  size: string;
}

export interface Scene {
  user: UserPose;
  objects: SceneObject[];
}

/** One program step: its source text and a distribution over step kinds. */
export interface Step {
  text: string;
  type_probs: number[];
  kind: string;
  surface: string;
}

/** Per-step reasoning snapshot; `p` is the distribution AFTER the step ran. */
export interface TraceEntry {
  step: Step;
  gamma_nodes: number[];
  gamma_edges: number[];
  p_s: number[];
  p_r: number[];
  p: number[];
  r_prime: number;
}

export interface PointingSegment {
  hand: string;
  start_index: number;
  end_index: number;
  start_time: number;
  end_time: number;
}

export interface Pointing {
  detected: boolean;
  scores: Record<string, number>;
  target: { x: number; y: number } | null;
  bandwidth: number;
  num_points: number;
  segments: PointingSegment[];
}

export interface TrajectorySample {
  t: number;
  head: [number, number, number];
  left?: [number, number, number] | null;
  right?: [number, number, number] | null;
}

export interface Trajectory {
  rate_hz: number;
  samples: TrajectorySample[];
}

/** Gesture evidence: either a clicked ground point or a raw trajectory. */
export type PointingInput = { x: number; y: number } | Trajectory;

export interface ReasonOptions {
  no_gesture?: boolean;
  trace?: boolean;
  temperature?: number;
}

export interface ReasonRequest {
  scene: Scene;
  instruction: string;
  pointing?: PointingInput;
  options?: ReasonOptions;
}

export interface ReasonResponse {
  prediction: string;
  final_p: number[];
  object_ids: string[];
  program: { steps: Step[] };
  pointing: Pointing | null;
  initial_p: number[];
  trace?: TraceEntry[];
}

export interface ParseResponse {
  steps: Step[];
}

/** Attribute vocabularies, one word list per picker. */
export interface Vocab {
  name: string[];
  color: string[];
  shape: string[];
  size: string[];
  relation: string[];
  demonstrative: string[];
}

/** Index order of `Step.type_probs` entries. */
export const STEP_KIND_ORDER = [
  "name",
  "color",
  "shape",
  "size",
  "demonstrative",
  "relation",
] as const;
