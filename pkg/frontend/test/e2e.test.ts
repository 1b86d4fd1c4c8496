/** End-to-end against a live orchestrator: spawns `python3 -m labloop
 * serve` from the repo root, drives the real form, and reads the real
 * event stream. */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { boot, type App } from "../src/main.js";

const PORT = 18750 + Math.floor(Math.random() * 200);
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = resolve(__dirname, "..", "..");

let server: ChildProcess;

async function waitForServer(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const res = await fetch(`${BASE}/api/runs`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("orchestrator never came up");
    await sleep(200);
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((r) => setTimeout(r, ms));
}

async function waitFor(check: () => boolean, timeoutMs = 60_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!check()) {
    if (Date.now() > deadline) throw new Error("condition never became true");
    await sleep(100);
  }
}

beforeAll(async () => {
  const runsDir = mkdtempSync(join(tmpdir(), "labloop-ui-e2e-"));
  server = spawn("python3", ["-m", "labloop", "serve", "--port", String(PORT),
                             "--runs", runsDir],
                 { cwd: REPO_ROOT, stdio: "ignore" });
  await waitForServer();
});

afterAll(() => {
  server?.kill();
});

describe("dashboard against a live orchestrator", () => {
  let app: App;

  it("submitting a grammar hypothesis reaches a rendered verdict card", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    app = boot(document, BASE);

    const textarea = document.querySelector<HTMLTextAreaElement>("textarea")!;
    textarea.value = "The bulk modulus of Kr-fcc is greater than that of Ar-fcc";
    document.querySelector<HTMLButtonElement>("button[type=submit]")!.click();

    await waitFor(() => document.querySelectorAll(".ruling-card").length === 1);
    const card = document.querySelector(".ruling-card")!;
    expect(card.textContent).toContain("supported");
    expect(document.querySelector(".stage-badge")).not.toBeNull();
  });

  it("a 2-round adversarial run renders exactly 4 bubbles plus 1 ruling", async () => {
    await waitFor(() => ["finished", "aborted"].includes(app.currentState()!.stage));
    expect(document.querySelectorAll(".bubble")).toHaveLength(4);
    expect(document.querySelectorAll(".bubble-supporter")).toHaveLength(2);
    expect(document.querySelectorAll(".bubble-skeptic")).toHaveLength(2);
    expect(document.querySelectorAll(".ruling-card")).toHaveLength(1);
    const progress = document.querySelector(".unit-progress")!.textContent;
    expect(progress).toBe("6/6 units");
  });

  it("reconnecting the event stream reproduces the transcript", async () => {
    const before = document.querySelector(".transcript-panel")!.innerHTML;
    const stateBefore = app.currentState()!;
    await app.reconnect(); // replays from seq 1
    await waitFor(() => ["finished", "aborted"].includes(app.currentState()!.stage));
    const after = document.querySelector(".transcript-panel")!.innerHTML;
    expect(after).toBe(before);
    expect(app.currentState()!.transcript).toEqual(stateBefore.transcript);
    expect(app.currentState()!.lastSeq).toBe(stateBefore.lastSeq);
  });

  it("empty hypothesis shows an inline error and sends no request", async () => {
    app.navigate("#/");
    const runsBefore = (await (await fetch(`${BASE}/api/runs`)).json()).runs.length;
    const textarea = document.querySelector<HTMLTextAreaElement>("textarea")!;
    textarea.value = "   ";
    document.querySelector<HTMLButtonElement>("button[type=submit]")!.click();
    await sleep(300);
    expect(document.querySelector(".form-error")!.textContent).toContain("Enter");
    const runsAfter = (await (await fetch(`${BASE}/api/runs`)).json()).runs.length;
    expect(runsAfter).toBe(runsBefore);
  });

  it("server-side validation errors surface verbatim in the banner", async () => {
    // bypass the client guard to exercise the API 400 passthrough
    const res = await fetch(`${BASE}/api/runs`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ hypothesis_text: "" }),
    });
    expect(res.status).toBe(400);
    const { ApiClient, ApiRequestError, formatApiError } = await import("../src/api.js");
    const api = new ApiClient(BASE);
    try {
      await api.submitRun("");
      throw new Error("should have rejected");
    } catch (err) {
      expect(err).toBeInstanceOf(ApiRequestError);
      expect(formatApiError((err as InstanceType<typeof ApiRequestError>).apiError))
        .toContain("empty_hypothesis");
    }
  });
});
