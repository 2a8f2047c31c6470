/** Browser entry point: wires the DOM controls to the session controller,
 * the canvas renderer, and the trace playback driver.
 */

import { SessionApi } from "./api.js";
import { SessionController } from "./controller.js";
import type { FamilyKind } from "./layout.js";
import { classifyFamily } from "./layout.js";
import { parseTraceText, PlaybackController } from "./playback.js";
import { BoardRenderer } from "./render.js";
import type { BudgetJson, Coords } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

const canvas = el<HTMLCanvasElement>("board");
const ctx = canvas.getContext("2d");
if (ctx === null) {
  throw new Error("canvas 2d context unavailable");
}
const renderer = new BoardRenderer(ctx, canvas.width, canvas.height);

const statusLine = el<HTMLDivElement>("status");
const banner = el<HTMLDivElement>("banner");
const serverInput = el<HTMLInputElement>("server-url");
const familyInput = el<HTMLInputElement>("family");
const ballInput = el<HTMLInputElement>("x0-ball");
const budgetKind = el<HTMLSelectElement>("budget-kind");
const budgetC = el<HTMLInputElement>("budget-c");
const budgetD = el<HTMLInputElement>("budget-d");
const rInput = el<HTMLInputElement>("spread-r");
const marginInput = el<HTMLInputElement>("margin");

let controller: SessionController | null = null;
let playback: PlaybackController | null = null;
let family: FamilyKind = { kind: "plane" };
let highlight: Coords[] = [];

function setBanner(text: string, isError: boolean): void {
  banner.textContent = text;
  banner.className = isError ? "banner error" : "banner";
}

function readBudget(): BudgetJson {
  const c = Number(budgetC.value);
  if (budgetKind.value === "polynomial") {
    return { kind: "polynomial", c, d: Number(budgetD.value) };
  }
  return { kind: "constant", c };
}

async function redraw(): Promise<void> {
  if (controller === null || !controller.open) {
    return;
  }
  const margin = Math.max(1, Math.min(12, Number(marginInput.value) || 2));
  const window = await controller.board(margin);
  renderer.draw(controller.model, family, window, highlight);
  const st = controller.model.state;
  const stable = st.stable ? " | stable" : "";
  statusLine.textContent =
    `turn ${st.turn} | burned ${st.burned_total}` +
    ` | budget left ${controller.model.remainingBudget}${stable}`;
}

async function newGame(): Promise<void> {
  if (controller !== null && controller.open) {
    await controller.close();
  }
  playback = null;
  const api = new SessionApi(serverInput.value);
  controller = new SessionController(api);
  family = classifyFamily(familyInput.value);
  highlight = [];
  try {
    await controller.create({
      family: familyInput.value,
      x0: { ball: Number(ballInput.value) },
      budget: readBudget(),
      r: Number(rInput.value),
    });
    setBanner("session open", false);
    await redraw();
  } catch (err) {
    setBanner(String(err instanceof Error ? err.message : err), true);
  }
}

async function submit(): Promise<void> {
  if (controller === null) {
    return;
  }
  const rejection = await controller.submitSelection();
  if (rejection === null) {
    highlight = [];
    setBanner("turn accepted", false);
  } else {
    highlight = rejection.vertices;
    setBanner(`${rejection.code}: ${rejection.message}`, true);
  }
  await redraw();
}

async function undo(): Promise<void> {
  if (controller === null) {
    return;
  }
  const rejection = await controller.undo();
  if (rejection === null) {
    highlight = [];
    setBanner("undone", false);
  } else {
    setBanner(`${rejection.code}: ${rejection.message}`, true);
  }
  await redraw();
}

async function exportTrace(): Promise<void> {
  if (controller === null) {
    return;
  }
  const text = await controller.exportTrace();
  const blob = new Blob([text], { type: "application/jsonl" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "session.trace";
  a.click();
  URL.revokeObjectURL(a.href);
}

async function loadPlayback(file: File): Promise<void> {
  const text = await file.text();
  const doc = parseTraceText(text);
  const api = new SessionApi(serverInput.value);
  if (controller !== null && controller.open) {
    await controller.close();
  }
  controller = new SessionController(api);
  playback = new PlaybackController(api, doc);
  family = classifyFamily(doc.header.family);
  const state = await playback.start();
  // mirror the playback session in the controller's model for rendering
  controller.attachPlayback(playback, state);
  setBanner(`playback: ${doc.turns.length} recorded turns`, false);
  await redraw();
}

async function playbackStep(): Promise<void> {
  if (playback === null || controller === null) {
    return;
  }
  const step = await playback.step();
  if (step === null) {
    setBanner("playback finished", false);
    return;
  }
  controller.model.applyState(step.state);
  setBanner(
    step.matches
      ? `turn ${step.turn} replayed`
      : `turn ${step.turn} diverges from the recording`,
    !step.matches,
  );
  await redraw();
}

async function playbackBack(): Promise<void> {
  if (playback === null || controller === null) {
    return;
  }
  const state = await playback.back();
  controller.model.applyUndo(state);
  await redraw();
}

canvas.addEventListener("click", (ev) => {
  if (controller === null || !controller.open) {
    return;
  }
  const rect = canvas.getBoundingClientRect();
  const hit = renderer.hitTest(ev.clientX - rect.left, ev.clientY - rect.top);
  if (hit !== null) {
    const accepted = controller.model.toggle(hit);
    if (!accepted) {
      setBanner("pick refused: cell unavailable or budget spent", true);
    }
    void redraw();
  }
});

el<HTMLButtonElement>("new-game").addEventListener("click", () => void newGame());
el<HTMLButtonElement>("submit-turn").addEventListener("click", () => void submit());
el<HTMLButtonElement>("pass-turn").addEventListener("click", () => {
  if (controller !== null) {
    controller.model.clearSelection();
    void submit();
  }
});
el<HTMLButtonElement>("undo-turn").addEventListener("click", () => void undo());
el<HTMLButtonElement>("export-trace").addEventListener(
  "click",
  () => void exportTrace(),
);
el<HTMLButtonElement>("playback-step").addEventListener(
  "click",
  () => void playbackStep(),
);
el<HTMLButtonElement>("playback-back").addEventListener(
  "click",
  () => void playbackBack(),
);
el<HTMLInputElement>("trace-file").addEventListener("change", (ev) => {
  const input = ev.target as HTMLInputElement;
  const file = input.files?.[0];
  if (file !== undefined) {
    void loadPlayback(file);
  }
});
