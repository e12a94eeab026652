/** Derives everything the canvas and side panels draw from the state.
 *
 * The view model is a pure projection: probabilities come straight from the
 * stored response (see heatById) and are only *checked* for normalization
 * here, never altered.
 */

import { ARENA, cursorEntry, heatById, traceLength } from "./state";
import type { WorkbenchState } from "./state";
import type { Step } from "./types";

export interface Viewport {
  width: number;
  height: number;
  margin: number;
}

export const DEFAULT_VIEWPORT: Viewport = { width: 640, height: 640, margin: 30 };

export function worldToPx(vp: Viewport, x: number, y: number): { px: number; py: number } {
  const spanX = ARENA.maxX - ARENA.minX;
  const spanY = ARENA.maxY - ARENA.minY;
  const innerW = vp.width - 2 * vp.margin;
  const innerH = vp.height - 2 * vp.margin;
  return {
    px: vp.margin + ((x - ARENA.minX) / spanX) * innerW,
    py: vp.margin + ((ARENA.maxY - y) / spanY) * innerH,
  };
}

export function pxToWorld(vp: Viewport, px: number, py: number): { x: number; y: number } {
  const spanX = ARENA.maxX - ARENA.minX;
  const spanY = ARENA.maxY - ARENA.minY;
  const innerW = vp.width - 2 * vp.margin;
  const innerH = vp.height - 2 * vp.margin;
  return {
    x: ARENA.minX + ((px - vp.margin) / innerW) * spanX,
    y: ARENA.maxY - ((py - vp.margin) / innerH) * spanY,
  };
}

/** Glyph vocabulary the painter knows how to draw. */
export type Glyph = "circle" | "square" | "rect-wide" | "rect-tall" | "arc" | "diamond";

const COLOR_FILLS: Record<string, string> = {
  black: "#2b2b2b",
  white: "#f2f2f2",
  red: "#d64541",
  blue: "#3a6fd8",
  green: "#38a169",
  yellow: "#d9b91c",
  orange: "#e67e22",
  purple: "#8e5bc0",
};

const SIZE_RADII: Record<string, number> = { tiny: 7, small: 10, big: 14, huge: 18 };

const SHAPE_GLYPHS: Record<string, Glyph> = {
  round: "circle",
  square: "square",
  flat: "rect-wide",
  long: "rect-tall",
  curved: "arc",
  angular: "diamond",
};

export interface ObjectView {
  id: string;
  x: number;
  y: number;
  px: number;
  py: number;
  radius: number;
  fill: string;
  glyph: Glyph;
  /** Pale fills still need a visible edge. */
  stroke: string;
  /** True for the predicted object — drawn with a bold outline. */
  outlined: boolean;
  /** Probability at the trace cursor, or null when the service never saw this object. */
  heat: number | null;
  /** Numeric probability label next to the glyph. */
  label: string | null;
  selected: boolean;
}

export interface SceneView {
  objects: ObjectView[];
  marker: { px: number; py: number } | null;
  user: { px: number; py: number; angle: number };
  /** Sum of the displayed distribution, or null before any response. */
  heatSum: number | null;
  /** Display check only: |heatSum - 1| <= 1e-6. */
  normalized: boolean | null;
  prediction: string | null;
  legend: string;
}

export function buildSceneView(
  state: WorkbenchState, vp: Viewport = DEFAULT_VIEWPORT,
): SceneView {
  const heat = heatById(state);
  const prediction = state.response?.prediction ?? null;
  const objects: ObjectView[] = state.scene.objects.map((o) => {
    const [x, y] = [o.position[0], o.position[1]];
    const { px, py } = worldToPx(vp, x, y);
    const h = heat !== null && o.id in heat ? (heat[o.id] as number) : null;
    return {
      id: o.id,
      x,
      y,
      px,
      py,
      radius: SIZE_RADII[o.size] ?? 10,
      fill: COLOR_FILLS[o.color] ?? "#999999",
      glyph: SHAPE_GLYPHS[o.shape] ?? "circle",
      stroke: o.color === "white" ? "#8a8a8a" : "#1c1c1c",
      outlined: prediction !== null && o.id === prediction,
      heat: h,
      label: h === null ? null : h.toFixed(3),
      selected: state.selected === o.id,
    };
  });

  let marker: { px: number; py: number } | null = null;
  if (state.pointing !== null && "x" in state.pointing) {
    const { px, py } = worldToPx(vp, state.pointing.x, state.pointing.y);
    marker = { px, py };
  }

  const heatSum = heat === null ? null : Object.values(heat).reduce((a, b) => a + b, 0);
  const normalized = heatSum === null ? null : Math.abs(heatSum - 1) <= 1e-6;
  const legend =
    heatSum === null
      ? "no response yet"
      : `Σp = ${heatSum.toFixed(6)} ${normalized ? "✓" : "✗ (not normalized)"}`;

  const userPos = worldToPx(vp, state.scene.user.head_position[0], state.scene.user.head_position[1]);
  const fwd = state.scene.user.forward;
  return {
    objects,
    marker,
    user: { ...userPos, angle: Math.atan2(-fwd[1], fwd[0]) },
    heatSum,
    normalized,
    prediction,
    legend,
  };
}

export interface StepView {
  /** Cursor position, 0..total. */
  index: number;
  total: number;
  /** Null at position 0 (initial distribution). */
  step: Step | null;
  /** Blend weight the service reported for this step, or null at position 0. */
  rPrime: number | null;
  title: string;
}

export function buildStepView(state: WorkbenchState): StepView {
  const total = traceLength(state.response);
  const entry = cursorEntry(state);
  const title =
    state.response === null
      ? "no response yet"
      : entry === null
        ? "initial distribution (uniform)"
        : `step ${state.cursor}/${total}: “${entry.step.text}” (${entry.step.kind})`;
  return {
    index: state.cursor,
    total,
    step: entry?.step ?? null,
    rPrime: entry?.r_prime ?? null,
    title,
  };
}
