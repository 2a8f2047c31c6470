/** Canvas board renderer.
 *
 * Draws the window of vertices reported by the board endpoint, colored by
 * the mirrored server state, with the pending selection and any rejected
 * vertices overlaid.  The viewport is fitted to the reported window (the
 * server already centers it on the fire plus a margin), so an infinite
 * family always renders inside a finite camera.
 *
 * The renderer only needs a small slice of CanvasRenderingContext2D, kept
 * as an interface so tests can pass a recording stub.
 */

import type { FamilyKind } from "./layout.js";
import { project } from "./layout.js";
import type { BoardViewModel } from "./model.js";
import type { BoardWindow, Coords } from "./types.js";
import { coordsKey, sameCoords } from "./types.js";

export interface Canvas2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  rect(x: number, y: number, w: number, h: number): void;
  fill(): void;
  stroke(): void;
}

export const PALETTE = {
  burning: "#d64541",
  protected: "#2e6fd8",
  untouched: "#d9d4c8",
  selected: "#1f9960",
  rejected: "#f5a623",
  background: "#faf8f4",
};

interface Placed {
  coords: Coords;
  px: number;
  py: number;
}

export class BoardRenderer {
  private readonly ctx: Canvas2D;
  private readonly width: number;
  private readonly height: number;
  private placed: Placed[] = [];
  private cellRadius = 6;

  constructor(ctx: Canvas2D, width: number, height: number) {
    this.ctx = ctx;
    this.width = width;
    this.height = height;
  }

  /** Fit the projected window into the canvas and draw every cell. */
  draw(
    model: BoardViewModel,
    family: FamilyKind,
    window: BoardWindow,
    highlight: Coords[] = [],
  ): void {
    const pts = window.vertices.map((c) => ({
      coords: c,
      p: project(family, c, window.ring_sizes),
    }));
    const xs = pts.map((q) => q.p.x);
    const ys = pts.map((q) => q.p.y);
    const minX = Math.min(...xs);
    const maxX = Math.max(...xs);
    const minY = Math.min(...ys);
    const maxY = Math.max(...ys);
    const spanX = Math.max(maxX - minX, 1e-9);
    const spanY = Math.max(maxY - minY, 1e-9);
    const pad = 24;
    const scale = Math.min(
      (this.width - 2 * pad) / spanX,
      (this.height - 2 * pad) / spanY,
    );
    this.cellRadius = Math.max(3, Math.min(14, scale * 0.38));
    const offX = (this.width - scale * spanX) / 2;
    const offY = (this.height - scale * spanY) / 2;
    this.placed = pts.map((q) => ({
      coords: q.coords,
      px: offX + (q.p.x - minX) * scale,
      // canvas y grows downward; flip so the projection's +y points up
      py: this.height - (offY + (q.p.y - minY) * scale),
    }));

    this.ctx.fillStyle = PALETTE.background;
    this.ctx.clearRect(0, 0, this.width, this.height);
    this.ctx.beginPath();
    this.ctx.rect(0, 0, this.width, this.height);
    this.ctx.fill();

    const rejected = new Set(highlight.map(coordsKey));
    for (const cell of this.placed) {
      this.drawCell(model, cell, rejected.has(coordsKey(cell.coords)));
    }
  }

  private drawCell(model: BoardViewModel, cell: Placed, rejected: boolean): void {
    const state = model.cellState(cell.coords);
    this.ctx.fillStyle = PALETTE[state];
    this.ctx.beginPath();
    this.ctx.arc(cell.px, cell.py, this.cellRadius, 0, 2 * Math.PI);
    this.ctx.fill();
    if (model.isSelected(cell.coords)) {
      this.ctx.strokeStyle = PALETTE.selected;
      this.ctx.lineWidth = 3;
      this.ctx.beginPath();
      this.ctx.arc(cell.px, cell.py, this.cellRadius + 2, 0, 2 * Math.PI);
      this.ctx.stroke();
    }
    if (rejected) {
      this.ctx.strokeStyle = PALETTE.rejected;
      this.ctx.lineWidth = 3;
      this.ctx.beginPath();
      this.ctx.arc(cell.px, cell.py, this.cellRadius + 5, 0, 2 * Math.PI);
      this.ctx.stroke();
    }
  }

  /** Map a canvas pixel to the nearest drawn vertex, if close enough. */
  hitTest(px: number, py: number): Coords | null {
    let best: Placed | null = null;
    let bestDist = Infinity;
    for (const cell of this.placed) {
      const d = Math.hypot(cell.px - px, cell.py - py);
      if (d < bestDist) {
        bestDist = d;
        best = cell;
      }
    }
    if (best !== null && bestDist <= this.cellRadius + 4) {
      return best.coords;
    }
    return null;
  }

  /** Pixel position of one vertex in the last draw, for tests and labels. */
  positionOf(c: Coords): { px: number; py: number } | null {
    for (const cell of this.placed) {
      if (sameCoords(cell.coords, c)) {
        return { px: cell.px, py: cell.py };
      }
    }
    return null;
  }
}
