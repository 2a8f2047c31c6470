import { describe, expect, it } from "vitest";

import { BoardViewModel } from "../src/model.js";
import type { SessionState } from "../src/types.js";

function state(partial: Partial<SessionState>): SessionState {
  return {
    id: "t",
    family: "square",
    r: 1,
    turn: 0,
    burning: [[0, 0]],
    protected: [],
    burned_total: 1,
    next_budget: 2,
    stable: false,
    ...partial,
  };
}

describe("BoardViewModel", () => {
  it("mirrors an applied server state exactly", () => {
    const m = new BoardViewModel();
    const s = state({ turn: 3, burning: [[0, 0], [1, 0]], protected: [[0, 1]] });
    m.applyState(s);
    expect(m.state).toEqual(s);
    expect(m.turn).toBe(3);
    expect(m.cellState([0, 0])).toBe("burning");
    expect(m.cellState([0, 1])).toBe("protected");
    expect(m.cellState([5, 5])).toBe("untouched");
  });

  it("blocks selection beyond the turn budget", () => {
    const m = new BoardViewModel();
    m.applyState(state({ next_budget: 2 }));
    expect(m.toggle([2, 0])).toBe(true);
    expect(m.toggle([3, 0])).toBe(true);
    expect(m.remainingBudget).toBe(0);
    expect(m.toggle([4, 0])).toBe(false);
    expect(m.remainingBudget).toBe(0);
    expect(m.selected.length).toBe(2);
  });

  it("never lets the remaining budget go negative", () => {
    const m = new BoardViewModel();
    m.applyState(state({ next_budget: 0 }));
    expect(m.toggle([1, 1])).toBe(false);
    expect(m.remainingBudget).toBe(0);
  });

  it("refuses picking burning or protected cells", () => {
    const m = new BoardViewModel();
    m.applyState(state({ burning: [[0, 0]], protected: [[0, 1]] }));
    expect(m.toggle([0, 0])).toBe(false);
    expect(m.toggle([0, 1])).toBe(false);
    expect(m.toggle([2, 2])).toBe(true);
  });

  it("toggling twice deselects and refunds the budget", () => {
    const m = new BoardViewModel();
    m.applyState(state({ next_budget: 1 }));
    expect(m.toggle([2, 0])).toBe(true);
    expect(m.remainingBudget).toBe(0);
    expect(m.toggle([2, 0])).toBe(true);
    expect(m.remainingBudget).toBe(1);
    expect(m.selected.length).toBe(0);
  });

  it("applyState clears the pending selection", () => {
    const m = new BoardViewModel();
    m.applyState(state({}));
    m.toggle([2, 0]);
    m.applyState(state({ turn: 1 }));
    expect(m.selected.length).toBe(0);
  });

  it("undo pops back to the exact prior state", () => {
    const m = new BoardViewModel();
    const s0 = state({ turn: 0 });
    const s1 = state({ turn: 1, burning: [[0, 0], [0, -1]], burned_total: 2 });
    m.applyState(s0);
    m.applyState(s1);
    m.applyUndo(s0);
    expect(m.state).toEqual(s0);
    expect(m.history.length).toBe(1);
    expect(m.cellState([0, -1])).toBe("untouched");
  });

  it("undo with an empty history throws", () => {
    const m = new BoardViewModel();
    m.applyState(state({}));
    expect(() => m.applyUndo(state({}))).toThrow();
  });
});
