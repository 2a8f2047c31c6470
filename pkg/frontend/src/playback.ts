/** Trace playback: step through a recorded game turn by turn.
 *
 * A trace file fixes the family, initial fire, budget, and the protection
 * set of every turn.  Playback creates a fresh server session from the
 * header and replays the recorded protections through the normal protect
 * endpoint, so the rendered states come from the engine, never from the
 * client.  After each step the recorded burning count is compared with the
 * server's; a difference marks the trace as diverged (for example a trace
 * cut by a radius cap that the live session does not apply).
 */

import type { SessionApi } from "./api.js";
import type { SessionState, TraceDoc, TraceHeader, TraceTurn } from "./types.js";

export function parseTraceText(text: string): TraceDoc {
  const lines = text
    .split("\n")
    .map((ln) => ln.trim())
    .filter((ln) => ln.length > 0);
  if (lines.length === 0) {
    throw new Error("empty trace file");
  }
  const header = JSON.parse(lines[0]!) as TraceHeader;
  if (header.kind !== "game-trace") {
    throw new Error(`not a game trace: kind ${String(header.kind)}`);
  }
  const turns = lines.slice(1).map((ln, i) => {
    const rec = JSON.parse(ln) as TraceTurn;
    if (rec.turn !== i + 1) {
      throw new Error(`trace turn ${rec.turn} out of order at line ${i + 2}`);
    }
    return rec;
  });
  return { header, turns };
}

export interface PlaybackStep {
  turn: number;
  state: SessionState;
  recorded: TraceTurn;
  /** False when the live engine disagrees with the recorded count. */
  matches: boolean;
}

export class PlaybackController {
  readonly doc: TraceDoc;
  private readonly api: SessionApi;
  private sessionId: string | null = null;
  private cursor = 0;
  diverged = false;

  constructor(api: SessionApi, doc: TraceDoc) {
    this.api = api;
    this.doc = doc;
  }

  get position(): number {
    return this.cursor;
  }

  get id(): string {
    if (this.sessionId === null) {
      throw new Error("playback not started");
    }
    return this.sessionId;
  }

  get finished(): boolean {
    return this.cursor >= this.doc.turns.length;
  }

  /** Open the backing session at turn 0 and return its initial state. */
  async start(): Promise<SessionState> {
    const h = this.doc.header;
    const created = await this.api.createSession({
      family: h.family,
      x0: { keys: h.x0 },
      budget: h.budget,
      r: h.r,
    });
    this.sessionId = created.id;
    this.cursor = 0;
    this.diverged = false;
    return created.state;
  }

  /** Play the next recorded turn; null when the trace is exhausted. */
  async step(): Promise<PlaybackStep | null> {
    if (this.sessionId === null) {
      throw new Error("playback not started");
    }
    if (this.finished) {
      return null;
    }
    const rec = this.doc.turns[this.cursor]!;
    const state = await this.api.protect(this.sessionId, rec.protected);
    this.cursor += 1;
    const matches = state.burned_total === rec.burning_count;
    if (!matches) {
      this.diverged = true;
    }
    return { turn: rec.turn, state, recorded: rec, matches };
  }

  /** Step back one recorded turn through the server's undo. */
  async back(): Promise<SessionState> {
    if (this.sessionId === null) {
      throw new Error("playback not started");
    }
    if (this.cursor === 0) {
      throw new Error("already at the start");
    }
    const state = await this.api.undo(this.sessionId);
    this.cursor -= 1;
    return state;
  }

  async close(): Promise<void> {
    if (this.sessionId !== null) {
      await this.api.close(this.sessionId);
      this.sessionId = null;
    }
  }
}
