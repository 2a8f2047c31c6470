/** Wire types for the firegraph serve endpoints and trace files.
 *
 * Every shape here mirrors a JSON document produced or consumed by the
 * server; the client never invents fields of its own on these objects.
 */

/** Integer coordinate tuple of one vertex, e.g. [3, -1]. */
export type Coords = number[];

export type BudgetJson =
  | { kind: "constant"; c: number }
  | { kind: "polynomial"; c: number; d: number }
  | { kind: "explicit"; values: number[] };

export type X0Spec = { ball: number } | { keys: Coords[] };

export interface SessionRequest {
  family: string;
  x0: X0Spec;
  budget: BudgetJson;
  r: number;
}

/** One immutable game state as reported by the server. */
export interface SessionState {
  id: string;
  family: string;
  r: number;
  turn: number;
  burning: Coords[];
  protected: Coords[];
  burned_total: number;
  next_budget: number;
  stable: boolean;
}

export interface SessionCreated {
  id: string;
  state: SessionState;
}

export interface BoardWindow {
  margin: number;
  vertices: Coords[];
  /** Present for hyper37: cycle length of each layer in the window. */
  ring_sizes?: Record<string, number>;
}

export interface CloseResult {
  closed: string;
  saved: string | null;
}

/** Structured error payload every non-2xx response carries. */
export interface ApiErrorBody {
  code: string;
  message: string;
  /** Offending vertices, when the rule names them. */
  vertices?: Coords[];
}

export interface TraceHeader {
  kind: "game-trace";
  family: string;
  key_tag: string;
  x0: Coords[];
  r: number;
  budget: BudgetJson;
  radius_cap: number;
  outcome: string;
  containment_time: number | null;
  burned_total: number;
}

export interface TraceTurn {
  turn: number;
  protected: Coords[];
  burning_count: number;
  frontier_count: number;
}

export interface TraceDoc {
  header: TraceHeader;
  turns: TraceTurn[];
}

export function coordsKey(c: Coords): string {
  return c.join(",");
}

export function sameCoords(a: Coords, b: Coords): boolean {
  return a.length === b.length && a.every((v, i) => v === b[i]);
}
