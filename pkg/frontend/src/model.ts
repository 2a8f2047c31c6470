/** Client-side board state: a mirror of the server's game state plus the
 * player's pending selection.
 *
 * The model never computes fire spread.  It stores exactly what the server
 * last returned, keeps a history stack of those states for undo display,
 * and tracks which vertices the player has picked for the coming turn.
 * Selection is blocked once the turn budget is reached, so the remaining
 * budget counter can never go negative; the server re-checks the same rule
 * on submit.
 */

import type { Coords, SessionState } from "./types.js";
import { coordsKey } from "./types.js";

export type CellState = "burning" | "protected" | "untouched";

export class BoardViewModel {
  /** Server states seen so far, oldest first; last entry is current. */
  readonly history: SessionState[] = [];
  private burningSet = new Set<string>();
  private protectedSet = new Set<string>();
  private selection = new Map<string, Coords>();

  get state(): SessionState {
    const last = this.history[this.history.length - 1];
    if (last === undefined) {
      throw new Error("no server state applied yet");
    }
    return last;
  }

  get turn(): number {
    return this.state.turn;
  }

  /** Budget still available this turn after the pending selection. */
  get remainingBudget(): number {
    return this.state.next_budget - this.selection.size;
  }

  get selected(): Coords[] {
    return [...this.selection.values()];
  }

  /** Replace the mirror with a state the server just returned. */
  applyState(state: SessionState): void {
    this.history.push(state);
    this.rebuildSets();
    this.selection.clear();
  }

  /** Mirror a successful server undo: drop the newest state. */
  applyUndo(state: SessionState): void {
    if (this.history.length < 2) {
      throw new Error("nothing to undo");
    }
    this.history.pop();
    const prior = this.state;
    if (JSON.stringify(prior) !== JSON.stringify(state)) {
      // The server is authoritative; a mismatch means this mirror is stale.
      this.history[this.history.length - 1] = state;
    }
    this.rebuildSets();
    this.selection.clear();
  }

  private rebuildSets(): void {
    const st = this.state;
    this.burningSet = new Set(st.burning.map(coordsKey));
    this.protectedSet = new Set(st.protected.map(coordsKey));
  }

  cellState(c: Coords): CellState {
    const k = coordsKey(c);
    if (this.burningSet.has(k)) {
      return "burning";
    }
    if (this.protectedSet.has(k)) {
      return "protected";
    }
    return "untouched";
  }

  isSelected(c: Coords): boolean {
    return this.selection.has(coordsKey(c));
  }

  /** Toggle a vertex in the pending selection.
   *
   * Returns false when the pick is refused: the vertex is already burning
   * or protected, or the turn budget is exhausted.
   */
  toggle(c: Coords): boolean {
    const k = coordsKey(c);
    if (this.selection.has(k)) {
      this.selection.delete(k);
      return true;
    }
    if (this.cellState(c) !== "untouched") {
      return false;
    }
    if (this.remainingBudget <= 0) {
      return false;
    }
    this.selection.set(k, [...c]);
    return true;
  }

  clearSelection(): void {
    this.selection.clear();
  }

  /** True when the last two server states burned the same set. */
  get stable(): boolean {
    return this.state.stable;
  }
}
