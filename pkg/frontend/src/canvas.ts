/** Canvas painter: draws a SceneView verbatim.  No probability math here. */

import { ARENA } from "./state";
import { worldToPx } from "./viewmodel";
import type { ObjectView, SceneView, Viewport } from "./viewmodel";

export function paintScene(canvas: HTMLCanvasElement, view: SceneView, vp: Viewport): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return; // headless test environments have no 2D context
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  paintGrid(ctx, vp);
  paintUser(ctx, view);
  for (const obj of view.objects) paintHeat(ctx, obj);
  for (const obj of view.objects) paintObject(ctx, obj);
  if (view.marker) paintMarker(ctx, view.marker);
}

function paintGrid(ctx: CanvasRenderingContext2D, vp: Viewport): void {
  ctx.save();
  ctx.strokeStyle = "#d8d8d8";
  ctx.lineWidth = 1;
  for (let x = ARENA.minX; x <= ARENA.maxX; x += 0.5) {
    const a = worldToPx(vp, x, ARENA.minY);
    const b = worldToPx(vp, x, ARENA.maxY);
    line(ctx, a.px, a.py, b.px, b.py);
  }
  for (let y = ARENA.minY; y <= ARENA.maxY; y += 0.5) {
    const a = worldToPx(vp, ARENA.minX, y);
    const b = worldToPx(vp, ARENA.maxX, y);
    line(ctx, a.px, a.py, b.px, b.py);
  }
  ctx.strokeStyle = "#8c8c8c";
  const lo = worldToPx(vp, ARENA.minX, ARENA.minY);
  const hi = worldToPx(vp, ARENA.maxX, ARENA.maxY);
  ctx.strokeRect(hi.px < lo.px ? hi.px : lo.px, hi.py < lo.py ? hi.py : lo.py,
    Math.abs(hi.px - lo.px), Math.abs(hi.py - lo.py));
  ctx.restore();
}

function paintUser(ctx: CanvasRenderingContext2D, view: SceneView): void {
  ctx.save();
  ctx.translate(view.user.px, view.user.py);
  ctx.rotate(view.user.angle);
  ctx.fillStyle = "#555";
  ctx.beginPath();
  ctx.moveTo(14, 0);
  ctx.lineTo(-7, 8);
  ctx.lineTo(-7, -8);
  ctx.closePath();
  ctx.fill();
  ctx.restore();
}

function paintHeat(ctx: CanvasRenderingContext2D, obj: ObjectView): void {
  if (obj.heat === null) return;
  ctx.save();
  ctx.fillStyle = `rgba(230, 90, 20, ${0.12 + 0.65 * obj.heat})`;
  ctx.beginPath();
  ctx.arc(obj.px, obj.py, obj.radius + 5 + 9 * obj.heat, 0, 2 * Math.PI);
  ctx.fill();
  ctx.restore();
}

function paintObject(ctx: CanvasRenderingContext2D, obj: ObjectView): void {
  ctx.save();
  ctx.fillStyle = obj.fill;
  ctx.strokeStyle = obj.stroke;
  ctx.lineWidth = 1.5;
  const r = obj.radius;
  ctx.beginPath();
  switch (obj.glyph) {
    case "circle":
      ctx.arc(obj.px, obj.py, r, 0, 2 * Math.PI);
      break;
    case "square":
      ctx.rect(obj.px - r, obj.py - r, 2 * r, 2 * r);
      break;
    case "rect-wide":
      ctx.rect(obj.px - 1.4 * r, obj.py - 0.6 * r, 2.8 * r, 1.2 * r);
      break;
    case "rect-tall":
      ctx.rect(obj.px - 0.6 * r, obj.py - 1.4 * r, 1.2 * r, 2.8 * r);
      break;
    case "arc":
      ctx.arc(obj.px, obj.py, r, Math.PI * 0.15, Math.PI * 1.15);
      break;
    case "diamond":
      ctx.moveTo(obj.px, obj.py - 1.2 * r);
      ctx.lineTo(obj.px + 1.2 * r, obj.py);
      ctx.lineTo(obj.px, obj.py + 1.2 * r);
      ctx.lineTo(obj.px - 1.2 * r, obj.py);
      ctx.closePath();
      break;
  }
  ctx.fill();
  ctx.stroke();

  if (obj.selected) {
    ctx.strokeStyle = "#3a6fd8";
    ctx.lineWidth = 1.5;
    ctx.setLineDash([4, 3]);
    ctx.strokeRect(obj.px - r - 7, obj.py - r - 7, 2 * r + 14, 2 * r + 14);
    ctx.setLineDash([]);
  }
  if (obj.outlined) {
    ctx.strokeStyle = "#0a8f3c";
    ctx.lineWidth = 3;
    ctx.beginPath();
    ctx.arc(obj.px, obj.py, r + 6, 0, 2 * Math.PI);
    ctx.stroke();
  }

  ctx.fillStyle = "#1c1c1c";
  ctx.font = "11px system-ui, sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(obj.id, obj.px, obj.py + r + 16);
  if (obj.label !== null) {
    ctx.fillStyle = "#9a3412";
    ctx.fillText(obj.label, obj.px, obj.py - r - 9);
  }
  ctx.restore();
}

function paintMarker(ctx: CanvasRenderingContext2D, marker: { px: number; py: number }): void {
  ctx.save();
  ctx.strokeStyle = "#c2185b";
  ctx.lineWidth = 2;
  line(ctx, marker.px - 9, marker.py, marker.px + 9, marker.py);
  line(ctx, marker.px, marker.py - 9, marker.px, marker.py + 9);
  ctx.beginPath();
  ctx.arc(marker.px, marker.py, 6, 0, 2 * Math.PI);
  ctx.stroke();
  ctx.restore();
}

function line(ctx: CanvasRenderingContext2D, x1: number, y1: number, x2: number, y2: number): void {
  ctx.beginPath();
  ctx.moveTo(x1, y1);
  ctx.lineTo(x2, y2);
  ctx.stroke();
}
