/**
 * Arena <-> canvas mapping.
 *
 * One uniform scale for both axes, arena centered in the viewport, y flipped
 * so arena y grows upward while canvas y grows downward. The mapping is fixed
 * for a given arena + viewport pair; drags invert it and clamp to the arena.
 */

import type { ArenaSize, Vec2 } from "./schema.js";

export interface ViewportSize {
  width: number;
  height: number;
}

export class ArenaMapping {
  readonly scale: number; // pixels per meter
  readonly originX: number; // canvas x of arena x = 0
  readonly originY: number; // canvas y of arena y = 0 (bottom edge)

  constructor(
    readonly arena: ArenaSize,
    viewport: ViewportSize,
    margin = 24,
  ) {
    const usableW = Math.max(viewport.width - 2 * margin, 1);
    const usableH = Math.max(viewport.height - 2 * margin, 1);
    this.scale = Math.min(usableW / arena.width, usableH / arena.height);
    this.originX = (viewport.width - this.scale * arena.width) / 2;
    this.originY = (viewport.height + this.scale * arena.height) / 2;
  }

  toScreen(p: Vec2): Vec2 {
    return [this.originX + p[0] * this.scale, this.originY - p[1] * this.scale];
  }

  toArena(s: Vec2): Vec2 {
    return [(s[0] - this.originX) / this.scale, (this.originY - s[1]) / this.scale];
  }

  clampToArena(p: Vec2): Vec2 {
    return [clamp(p[0], this.arena.width), clamp(p[1], this.arena.height)];
  }

  /** Where a drag at canvas point s should put the actor. */
  dragTarget(s: Vec2): Vec2 {
    return this.clampToArena(this.toArena(s));
  }
}

function clamp(v: number, hi: number): number {
  return Math.min(Math.max(v, 0), hi);
}
