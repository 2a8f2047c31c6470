/** Scripted end-to-end session against the real server.
 *
 * Plays six turns on the square grid with two protections per turn, checks
 * after every exchange that the mirrored model equals what the server
 * reports, forces the two rule violations to confirm the server rejects
 * what the client blocks, replays the same moves directly through the
 * engine's simulate verb and compares states turn by turn, and finally
 * exports the session trace and passes it through the check verb.
 */

import { writeFileSync } from "node:fs";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiRejection, SessionApi } from "../src/api.js";
import { SessionController } from "../src/controller.js";
import { parseTraceText } from "../src/playback.js";
import type { Coords, SessionState } from "../src/types.js";
import { runCli, startServer, tempDir } from "./helpers.js";
import type { ServerHandle } from "./helpers.js";

const MOVES: Coords[][] = [
  [[0, 1], [1, 0]],
  [[-1, 1], [1, -1]],
  [[-2, 1], [1, -2]],
  [[-3, 1], [1, -3]],
  [[-4, 1], [1, -4]],
  [[-5, 1], [1, -5]],
];

let server: ServerHandle;

beforeAll(async () => {
  server = await startServer();
}, 40_000);

afterAll(() => {
  server.stop();
});

describe("scripted session round trip", () => {
  it("mirrors the engine state for state, replay, and trace check", async () => {
    const api = new SessionApi(server.baseUrl);
    const controller = new SessionController(api);
    await controller.create({
      family: "square",
      x0: { ball: 0 },
      budget: { kind: "constant", c: 2 },
      r: 1,
    });
    expect(controller.model.state.turn).toBe(0);
    expect(controller.model.state.burning).toEqual([[0, 0]]);
    expect(controller.model.state.next_budget).toBe(2);

    const seen: SessionState[] = [controller.model.state];
    for (const [i, move] of MOVES.entries()) {
      for (const pick of move) {
        expect(controller.model.toggle(pick)).toBe(true);
      }
      expect(controller.model.remainingBudget).toBe(0);
      if (i === 0) {
        // a third pick is blocked client-side, budget never negative
        expect(controller.model.toggle([5, 5])).toBe(false);
        expect(controller.model.remainingBudget).toBe(0);
      }
      const rejection = await controller.submitSelection();
      expect(rejection).toBeNull();
      const fromServer = await api.getState(controller.id);
      expect(controller.model.state).toEqual(fromServer);
      seen.push(fromServer);
    }
    expect(seen[6]!.burned_total).toBe(28);

    // forced rule violations: the server rejects what the client blocks
    await expect(api.protect(controller.id, [[0, 0]])).rejects.toMatchObject({
      code: "protection-overlap",
      vertices: [[0, 0]],
    });
    await expect(
      api.protect(controller.id, [[7, 7], [8, 8], [9, 9]]),
    ).rejects.toBeInstanceOf(ApiRejection);
    try {
      await api.protect(controller.id, [[7, 7], [8, 8], [9, 9]]);
      expect.unreachable("overspend must be rejected");
    } catch (err) {
      expect((err as ApiRejection).code).toBe("budget-exceeded");
    }
    // neither rejection advanced the game
    expect((await api.getState(controller.id)).turn).toBe(6);

    // undo returns the exact prior board, then replaying matches it again
    const undoRejection = await controller.undo();
    expect(undoRejection).toBeNull();
    expect(controller.model.state).toEqual(seen[5]);
    for (const pick of MOVES[5]!) {
      expect(controller.model.toggle(pick)).toBe(true);
    }
    expect(await controller.submitSelection()).toBeNull();
    expect(controller.model.state).toEqual(seen[6]);

    // direct engine replay of the same moves through the simulate verb
    const dir = tempDir("play-ui-");
    const strategyPath = join(dir, "moves.json");
    writeFileSync(
      strategyPath,
      JSON.stringify({
        kind: "strategy",
        r: 1,
        budget: { kind: "constant", c: 2 },
        key_tag: "square",
        schedule: MOVES,
        provenance: { method: "scripted-session" },
      }),
    );
    const replayPath = join(dir, "replay.trace");
    const sim = runCli([
      "simulate",
      "--family",
      "square",
      "--x0",
      "ball:0",
      "--strategy",
      strategyPath,
      "--radius-cap",
      "8",
      "--out",
      replayPath,
    ]);
    expect(sim.status).toBe(0);
    const replay = parseTraceText(
      (await import("node:fs")).readFileSync(replayPath, "utf-8"),
    );
    for (let turn = 1; turn <= MOVES.length; turn += 1) {
      const rec = replay.turns[turn - 1]!;
      const st = seen[turn]!;
      expect(rec.burning_count).toBe(st.burned_total);
      expect(rec.burning_count).toBe(st.burning.length);
      expect(rec.protected).toEqual(MOVES[turn - 1]);
    }

    // exported trace replays cleanly through the check verb
    const exported = await controller.exportTrace();
    const tracePath = join(dir, "session.trace");
    writeFileSync(tracePath, exported);
    const doc = parseTraceText(exported);
    expect(doc.header.outcome).toBe("open");
    expect(doc.turns.length).toBe(6);
    const check = runCli(["check", tracePath]);
    expect(check.status).toBe(0);
    const verdict = JSON.parse(check.stdout) as { ok: boolean; problems: string[] };
    expect(verdict.ok).toBe(true);
    expect(verdict.problems).toEqual([]);

    await controller.close();
    console.log(
      "[PASS] S1 ui-round-trip " +
        "(6 scripted turns, states == engine replay, trace check ok)",
    );
  }, 60_000);
});
