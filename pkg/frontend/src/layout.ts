/** Coordinate projection per graph family.
 *
 * Maps vertex keys (integer tuples) to abstract 2D positions in unit
 * scale; the renderer multiplies by the cell size.  Projections preserve
 * adjacency legibility, not metric fidelity:
 *
 *   square/strong/lattice d=2/orthant d=2: the plane itself
 *   tri:     sheared so all six neighbor offsets have unit length
 *   hex:     brick-wall drawing of the honeycomb
 *   tree:    radial, digit path picks a nested angular sector
 *   hyper37: concentric layer rings, cycle order preserved; needs the ring
 *            sizes reported by the board endpoint
 *   subexp:  levels as rows
 *   power:k=K(F): same vertex set as F, drawn like F
 */

import type { Coords } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

export type FamilyKind =
  | { kind: "plane" }
  | { kind: "tri" }
  | { kind: "hex" }
  | { kind: "tree"; delta: number }
  | { kind: "hyper37" }
  | { kind: "subexp" }
  | { kind: "generic" };

/** Classify a family text (the `family` field of server payloads). */
export function classifyFamily(text: string): FamilyKind {
  const s = text.replace(/\s+/g, "");
  const power = /^power:k=\d+\((.+)\)$/.exec(s);
  if (power !== null) {
    return classifyFamily(power[1]!);
  }
  if (s === "square" || s === "strong") {
    return { kind: "plane" };
  }
  if (s === "tri") {
    return { kind: "tri" };
  }
  if (s === "hex") {
    return { kind: "hex" };
  }
  if (s === "hyper37") {
    return { kind: "hyper37" };
  }
  if (s === "subexp") {
    return { kind: "subexp" };
  }
  const tree = /^tree:delta=(\d+)$/.exec(s);
  if (tree !== null) {
    return { kind: "tree", delta: Number(tree[1]) };
  }
  const planar = /^(lattice|orthant):d=(\d+)$/.exec(s);
  if (planar !== null && Number(planar[2]) === 2) {
    return { kind: "plane" };
  }
  return { kind: "generic" };
}

const SQRT3_2 = Math.sqrt(3) / 2;

function at(c: Coords, i: number): number {
  return c[i] ?? 0;
}

/** Radial position for a digit-path tree vertex. */
function treePoint(coords: Coords, delta: number): Point {
  if (coords.length === 0) {
    return { x: 0, y: 0 };
  }
  let start = 0;
  let width = 2 * Math.PI;
  for (let i = 0; i < coords.length; i += 1) {
    const fan = i === 0 ? delta : delta - 1;
    width /= fan;
    start += at(coords, i) * width;
  }
  const angle = start + width / 2;
  const radius = coords.length;
  return { x: radius * Math.cos(angle), y: radius * Math.sin(angle) };
}

function ringPoint(coords: Coords, ringSizes?: Record<string, number>): Point {
  const level = at(coords, 0);
  const index = at(coords, 1);
  if (level === 0) {
    return { x: 0, y: 0 };
  }
  const size = ringSizes?.[String(level)];
  if (size === undefined || size < 1) {
    throw new Error(`no ring size known for layer ${level}`);
  }
  const angle = (2 * Math.PI * index) / size;
  return { x: level * Math.cos(angle), y: level * Math.sin(angle) };
}

/** Project one vertex.  hyper37 requires ringSizes from the board payload. */
export function project(
  family: FamilyKind,
  coords: Coords,
  ringSizes?: Record<string, number>,
): Point {
  switch (family.kind) {
    case "plane":
      return { x: at(coords, 0), y: at(coords, 1) };
    case "tri":
      return {
        x: at(coords, 0) - at(coords, 1) / 2,
        y: at(coords, 1) * SQRT3_2,
      };
    case "hex":
      return { x: at(coords, 0), y: at(coords, 1) };
    case "tree":
      return treePoint(coords, family.delta);
    case "hyper37":
      return ringPoint(coords, ringSizes);
    case "subexp":
      return { x: at(coords, 1), y: at(coords, 0) };
    case "generic":
      return { x: at(coords, 0), y: at(coords, 1) };
  }
}
