/** Session controller: glue between the API client and the view model.
 *
 * One controller drives one session (one tab, one game).  Every mutation
 * waits for the server's response before touching the model; there is no
 * optimistic update.  Server rejections are surfaced as a Rejection value
 * for inline display, with the offending vertices kept for highlighting,
 * and leave both the model and the pending selection untouched.
 */

import { ApiRejection, SessionApi } from "./api.js";
import { BoardViewModel } from "./model.js";
import type { PlaybackController } from "./playback.js";
import type { BoardWindow, Coords, SessionRequest, SessionState } from "./types.js";

export interface Rejection {
  code: string;
  message: string;
  vertices: Coords[];
}

export class SessionController {
  readonly api: SessionApi;
  readonly model = new BoardViewModel();
  private sessionId: string | null = null;
  lastRejection: Rejection | null = null;

  constructor(api: SessionApi) {
    this.api = api;
  }

  get id(): string {
    if (this.sessionId === null) {
      throw new Error("no session open");
    }
    return this.sessionId;
  }

  get open(): boolean {
    return this.sessionId !== null;
  }

  async create(req: SessionRequest): Promise<void> {
    const created = await this.api.createSession(req);
    this.sessionId = created.id;
    this.lastRejection = null;
    this.model.applyState(created.state);
  }

  /** Mirror a playback-owned session so the board endpoint and the model
   * render it like a live game. */
  attachPlayback(playback: PlaybackController, initial: SessionState): void {
    this.sessionId = playback.id;
    this.lastRejection = null;
    this.model.applyState(initial);
  }

  /** Submit the pending selection as this turn's protections.
   *
   * Returns null on success (model advanced to the server's new state) or
   * the rejection for inline rendering (model and selection unchanged).
   */
  async submitSelection(): Promise<Rejection | null> {
    const picks = this.model.selected;
    try {
      const state = await this.api.protect(this.id, picks);
      this.model.applyState(state);
      this.lastRejection = null;
      return null;
    } catch (err) {
      if (err instanceof ApiRejection) {
        this.lastRejection = {
          code: err.code,
          message: err.message,
          vertices: err.vertices,
        };
        return this.lastRejection;
      }
      throw err;
    }
  }

  /** Pass the turn: no protections, fire spreads one step. */
  async passTurn(): Promise<Rejection | null> {
    this.model.clearSelection();
    return this.submitSelection();
  }

  async undo(): Promise<Rejection | null> {
    try {
      const state = await this.api.undo(this.id);
      this.model.applyUndo(state);
      this.lastRejection = null;
      return null;
    } catch (err) {
      if (err instanceof ApiRejection) {
        this.lastRejection = {
          code: err.code,
          message: err.message,
          vertices: err.vertices,
        };
        return this.lastRejection;
      }
      throw err;
    }
  }

  board(margin: number): Promise<BoardWindow> {
    return this.api.board(this.id, margin);
  }

  /** Download the play-so-far as a JSON-lines trace document. */
  exportTrace(): Promise<string> {
    return this.api.trace(this.id);
  }

  async close(save?: string): Promise<void> {
    if (this.sessionId !== null) {
      await this.api.close(this.sessionId, save);
      this.sessionId = null;
    }
  }
}
