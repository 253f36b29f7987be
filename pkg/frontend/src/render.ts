/**
 * Canvas scene: arena, fields, overlaps, devices, actors.
 *
 * Draws exactly what the latest snapshot says. Polygons are traced from the
 * server's vertex lists as-is; nothing geometric is recomputed client-side.
 */

import type { Snapshot, Vec2 } from "./schema.js";
import type { ArenaMapping } from "./transform.js";
import type { ViewModel } from "./model.js";

const BACKGROUND = "#10141a";
const GRID = "#232a35";
const ARENA_EDGE = "#4a5568";
const USER_FIELD = "rgba(72, 187, 120, 0.18)";
const USER_EDGE = "rgba(72, 187, 120, 0.8)";
const DEVICE_FIELD = "rgba(66, 153, 225, 0.16)";
const DEVICE_EDGE = "rgba(66, 153, 225, 0.8)";
const OVERLAP_FIELD = "rgba(237, 137, 54, 0.45)";
const OVERLAP_EDGE = "rgba(237, 137, 54, 0.95)";
const ACTOR = "#e2e8f0";
const ACTOR_DRIVEN = "#f6ad55";
const DEVICE = "#90cdf4";
const LABEL = "#a0aec0";
const GHOST = "rgba(226, 232, 240, 0.35)";

export function drawScene(
  ctx: CanvasRenderingContext2D,
  vm: ViewModel,
  mapping: ArenaMapping,
): void {
  const { width, height } = ctx.canvas;
  ctx.fillStyle = BACKGROUND;
  ctx.fillRect(0, 0, width, height);

  const snap = vm.snapshot;
  if (!snap) {
    banner(ctx, vm.status === "disconnected" ? "disconnected" : "waiting for snapshot");
    return;
  }

  drawGrid(ctx, snap, mapping);

  for (const field of snap.device_fields) {
    fillPolygon(ctx, mapping, field.vertices, DEVICE_FIELD, DEVICE_EDGE);
  }
  for (const field of snap.user_fields) {
    fillPolygon(ctx, mapping, field.vertices, USER_FIELD, USER_EDGE);
  }
  for (const binding of snap.bindings) {
    fillPolygon(ctx, mapping, binding.intersection, OVERLAP_FIELD, OVERLAP_EDGE);
  }

  for (const device of snap.devices) {
    const [x, y] = mapping.toScreen(device.position);
    ctx.fillStyle = DEVICE;
    ctx.fillRect(x - 6, y - 6, 12, 12);
    if (device.directionality === "directional") {
      const [fx, fy] = mapping.toScreen([
        device.position[0] + 0.35 * Math.cos(device.facing),
        device.position[1] + 0.35 * Math.sin(device.facing),
      ]);
      stroke(ctx, DEVICE, 2, () => {
        ctx.moveTo(x, y);
        ctx.lineTo(fx, fy);
      });
    }
    label(ctx, device.name, x, y - 12);
  }

  for (const actor of snap.actors) {
    const [x, y] = mapping.toScreen(actor.position);
    ctx.fillStyle = actor.client_driven ? ACTOR_DRIVEN : ACTOR;
    ctx.beginPath();
    ctx.arc(x, y, 7, 0, Math.PI * 2);
    ctx.fill();
    const [hx, hy] = mapping.toScreen([
      actor.position[0] + 0.3 * Math.cos(actor.heading),
      actor.position[1] + 0.3 * Math.sin(actor.heading),
    ]);
    stroke(ctx, ctx.fillStyle as string, 2, () => {
      ctx.moveTo(x, y);
      ctx.lineTo(hx, hy);
    });
    label(ctx, actor.name, x, y - 12);
  }

  // drag with no connection: show where the pointer is, send nothing
  if (vm.drag && vm.status !== "connected") {
    const [gx, gy] = vm.drag.screen;
    ctx.fillStyle = GHOST;
    ctx.beginPath();
    ctx.arc(gx, gy, 7, 0, Math.PI * 2);
    ctx.fill();
  }

  if (vm.status === "disconnected") {
    ctx.fillStyle = "rgba(16, 20, 26, 0.55)";
    ctx.fillRect(0, 0, width, height);
    banner(ctx, "disconnected - showing last snapshot");
  } else if (snap.paused) {
    banner(ctx, "paused");
  }
}

function drawGrid(
  ctx: CanvasRenderingContext2D,
  snap: Snapshot,
  mapping: ArenaMapping,
): void {
  const { width: aw, height: ah } = snap.arena;
  stroke(ctx, GRID, 1, () => {
    for (let x = 1; x < aw; x++) {
      const [sx, sy0] = mapping.toScreen([x, 0]);
      const [, sy1] = mapping.toScreen([x, ah]);
      ctx.moveTo(sx, sy0);
      ctx.lineTo(sx, sy1);
    }
    for (let y = 1; y < ah; y++) {
      const [sx0, sy] = mapping.toScreen([0, y]);
      const [sx1] = mapping.toScreen([aw, y]);
      ctx.moveTo(sx0, sy);
      ctx.lineTo(sx1, sy);
    }
  });
  const [left, bottom] = mapping.toScreen([0, 0]);
  const [right, top] = mapping.toScreen([aw, ah]);
  stroke(ctx, ARENA_EDGE, 2, () => {
    ctx.rect(left, top, right - left, bottom - top);
  });
}

function fillPolygon(
  ctx: CanvasRenderingContext2D,
  mapping: ArenaMapping,
  vertices: Vec2[],
  fill: string,
  edge: string,
): void {
  if (vertices.length < 3) return;
  ctx.beginPath();
  const [x0, y0] = mapping.toScreen(vertices[0]);
  ctx.moveTo(x0, y0);
  for (let i = 1; i < vertices.length; i++) {
    const [x, y] = mapping.toScreen(vertices[i]);
    ctx.lineTo(x, y);
  }
  ctx.closePath();
  ctx.fillStyle = fill;
  ctx.fill();
  ctx.strokeStyle = edge;
  ctx.lineWidth = 1.5;
  ctx.stroke();
}

function stroke(
  ctx: CanvasRenderingContext2D,
  style: string,
  width: number,
  path: () => void,
): void {
  ctx.beginPath();
  path();
  ctx.strokeStyle = style;
  ctx.lineWidth = width;
  ctx.stroke();
}

function label(ctx: CanvasRenderingContext2D, text: string, x: number, y: number): void {
  ctx.fillStyle = LABEL;
  ctx.font = "12px system-ui, sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(text, x, y);
}

function banner(ctx: CanvasRenderingContext2D, text: string): void {
  const { width, height } = ctx.canvas;
  ctx.fillStyle = "#f56565";
  ctx.font = "bold 16px system-ui, sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(text, width / 2, height / 2);
}
