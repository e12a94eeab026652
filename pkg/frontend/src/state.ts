/** Pure workbench state and its transitions.
 *
 * Every function here returns a new state object; nothing touches the DOM or
 * the network.  The state is a plain view of API payloads — probabilities are
 * stored exactly as the service returned them and never recomputed.
 */

import type {
  PointingInput,
  ReasonRequest,
  ReasonResponse,
  Scene,
  SceneObject,
  TraceEntry,
  Vocab,
} from "./types";

/** Editable ground plane: a 4 m x 4 m area in front of the user. */
export const ARENA = { minX: 0, maxX: 4, minY: -2, maxY: 2 } as const;

export interface WorkbenchState {
  scene: Scene;
  /** Click marker or uploaded trajectory; null means no gesture evidence. */
  pointing: PointingInput | null;
  instruction: string;
  /** When set, the request asks the service to ignore gesture evidence. */
  noGesture: boolean;
  /** Last successful response, kept verbatim. */
  response: ReasonResponse | null;
  /** Trace cursor: 0 shows the initial distribution, k shows the state after step k. */
  cursor: number;
  /** Error banner text, or null when hidden. */
  banner: string | null;
  /** Sequence number of the most recently issued request. */
  seq: number;
  /** Sequence number still awaiting a reply, or null when idle. */
  pending: number | null;
  /** Object id whose attribute pickers are open, or null. */
  selected: string | null;
}

const FALLBACK_ATTRS = { name: "cube", color: "red", shape: "square", size: "small" };

export function initialState(): WorkbenchState {
  return {
    scene: {
      user: { head_position: [0, 0, 1.6], forward: [1, 0] },
      objects: [
        demoObject("obj-1", 1.0, 0.0, "ball", "red", "round", "small"),
        demoObject("obj-2", 1.2, 0.0, "cube", "blue", "square", "small"),
        demoObject("obj-3", 3.5, 0.0, "cube", "blue", "square", "small"),
      ],
    },
    pointing: null,
    instruction: "pick up the cube near the ball",
    noGesture: false,
    response: null,
    cursor: 0,
    banner: null,
    seq: 0,
    pending: null,
    selected: null,
  };
}

function demoObject(
  id: string, x: number, y: number,
  name: string, color: string, shape: string, size: string,
): SceneObject {
  return { id, position: [x, y, 0], name, color, shape, size };
}

export function isTrajectory(p: PointingInput): p is { rate_hz: number; samples: unknown[] } & PointingInput {
  return typeof p === "object" && p !== null && "samples" in p;
}

const clamp = (v: number, lo: number, hi: number) => Math.min(hi, Math.max(lo, v));

// ---------------------------------------------------------------------------
// Scene editing

export function addObject(state: WorkbenchState, vocab: Vocab | null): WorkbenchState {
  let n = state.scene.objects.length + 1;
  while (state.scene.objects.some((o) => o.id === `obj-${n}`)) n += 1;
  const i = state.scene.objects.length;
  const fresh: SceneObject = {
    id: `obj-${n}`,
    position: [
      clamp(0.8 + 0.45 * (i % 7), ARENA.minX, ARENA.maxX),
      clamp(-1.5 + 0.5 * (i % 7), ARENA.minY, ARENA.maxY),
      0,
    ],
    name: vocab?.name[0] ?? FALLBACK_ATTRS.name,
    color: vocab?.color[0] ?? FALLBACK_ATTRS.color,
    shape: vocab?.shape[0] ?? FALLBACK_ATTRS.shape,
    size: vocab?.size[0] ?? FALLBACK_ATTRS.size,
  };
  return {
    ...state,
    scene: { ...state.scene, objects: [...state.scene.objects, fresh] },
    selected: fresh.id,
  };
}

export function updateObject(
  state: WorkbenchState, id: string, patch: Partial<Omit<SceneObject, "id">>,
): WorkbenchState {
  const objects = state.scene.objects.map((o) => (o.id === id ? { ...o, ...patch } : o));
  return { ...state, scene: { ...state.scene, objects } };
}

export function moveObject(state: WorkbenchState, id: string, x: number, y: number): WorkbenchState {
  return updateObject(state, id, {
    position: [clamp(x, ARENA.minX, ARENA.maxX), clamp(y, ARENA.minY, ARENA.maxY), 0],
  });
}

export function removeObject(state: WorkbenchState, id: string): WorkbenchState {
  const objects = state.scene.objects.filter((o) => o.id !== id);
  return {
    ...state,
    scene: { ...state.scene, objects },
    selected: state.selected === id ? null : state.selected,
  };
}

export function selectObject(state: WorkbenchState, id: string | null): WorkbenchState {
  return { ...state, selected: id };
}

// ---------------------------------------------------------------------------
// Inputs

export function setInstruction(state: WorkbenchState, text: string): WorkbenchState {
  return { ...state, instruction: text };
}

export function toggleNoGesture(state: WorkbenchState): WorkbenchState {
  return { ...state, noGesture: !state.noGesture };
}

export function setPointing(state: WorkbenchState, x: number, y: number): WorkbenchState {
  return { ...state, pointing: { x, y } };
}

export function setTrajectory(state: WorkbenchState, trajectory: PointingInput): WorkbenchState {
  return { ...state, pointing: trajectory };
}

export function clearPointing(state: WorkbenchState): WorkbenchState {
  return { ...state, pointing: null };
}

// ---------------------------------------------------------------------------
// Request lifecycle: at most one request counts; replies carrying a stale
// sequence number are discarded without touching the state.

export interface SubmitTicket {
  state: WorkbenchState;
  seq: number;
  request: ReasonRequest;
}

export function beginSubmit(state: WorkbenchState): SubmitTicket {
  const seq = state.seq + 1;
  const request: ReasonRequest = {
    scene: state.scene,
    instruction: state.instruction,
    options: { trace: true, ...(state.noGesture ? { no_gesture: true } : {}) },
  };
  if (state.pointing !== null) {
    request.pointing = state.pointing;
  }
  return { state: { ...state, seq, pending: seq }, seq, request };
}

export function applyResponse(
  state: WorkbenchState, seq: number, response: ReasonResponse,
): WorkbenchState {
  if (seq !== state.pending) return state;
  return { ...state, response, cursor: 0, banner: null, pending: null };
}

export function applyFailure(state: WorkbenchState, seq: number, message: string): WorkbenchState {
  if (seq !== state.pending) return state;
  return { ...state, banner: message, pending: null };
}

export function clearBanner(state: WorkbenchState): WorkbenchState {
  return { ...state, banner: null };
}

// ---------------------------------------------------------------------------
// Trace cursor

export function traceLength(response: ReasonResponse | null): number {
  return response?.trace?.length ?? 0;
}

export function stepTrace(state: WorkbenchState, delta: number): WorkbenchState {
  const cursor = clamp(state.cursor + delta, 0, traceLength(state.response));
  return cursor === state.cursor ? state : { ...state, cursor };
}

export function setCursor(state: WorkbenchState, cursor: number): WorkbenchState {
  return { ...state, cursor: clamp(Math.round(cursor), 0, traceLength(state.response)) };
}

/** Distribution shown at the current cursor, exactly as the service sent it. */
export function cursorDistribution(state: WorkbenchState): number[] | null {
  const r = state.response;
  if (r === null) return null;
  const trace = r.trace ?? [];
  if (trace.length === 0) return r.final_p;
  if (state.cursor === 0) return r.initial_p;
  return trace[Math.min(state.cursor, trace.length) - 1]?.p ?? r.final_p;
}

/** Trace entry for the step the cursor just crossed, or null at position 0. */
export function cursorEntry(state: WorkbenchState): TraceEntry | null {
  const trace = state.response?.trace ?? [];
  if (state.cursor === 0 || trace.length === 0) return null;
  return trace[Math.min(state.cursor, trace.length) - 1] ?? null;
}

/** Map object id -> probability at the cursor, or null before any response. */
export function heatById(state: WorkbenchState): Record<string, number> | null {
  const dist = cursorDistribution(state);
  const r = state.response;
  if (dist === null || r === null) return null;
  const heat: Record<string, number> = {};
  r.object_ids.forEach((id, i) => {
    const v = dist[i];
    if (v !== undefined) heat[id] = v;
  });
  return heat;
}
