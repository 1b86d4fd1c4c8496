import { describe, expect, it } from "vitest";

import { applyEvent, initialRunView, snapshotToView } from "../src/model.js";
import { renderRun } from "../src/render.js";
import type { RunEventDoc, RunSnapshot } from "../src/types.js";

let seq = 0;
function evt(kind: string, payload: Record<string, any>): RunEventDoc {
  return { seq: ++seq, timestamp: "t", kind, payload };
}

function debateRunEvents(rounds: number): RunEventDoc[] {
  seq = 0;
  const events = [
    evt("state_changed", { to: "created", hypothesis: { text: "x" } }),
    evt("state_changed", { to: "pre_experiment" }),
    evt("state_changed", {
      to: "experimenting",
      canonical: {},
      spec: { units: [{ unit_id: "m0-t0" }, { unit_id: "m0-t1" }], failures: [] },
    }),
    evt("unit_completed", { unit_id: "m0-t0", outcome: {} }),
    evt("unit_completed", { unit_id: "m0-t1", outcome: {} }),
    evt("state_changed", { to: "discussing" }),
  ];
  for (let r = 0; r < rounds; r++) {
    for (const role of ["supporter", "skeptic"]) {
      events.push(evt("debate_turn", {
        iteration: 0, round_index: r, role,
        argument: { text: `${role} r${r}`, cites: ["margin"] },
      }));
    }
  }
  events.push(evt("verdict", {
    iteration: 0,
    verdict: { strategy: "adversarial", decision: "supported",
               confidence: 1.0, iteration: 0 },
  }));
  events.push(evt("state_changed", { to: "reporting", final_decision: "supported" }));
  events.push(evt("report_ready", { report: { final_decision: "supported" } }));
  events.push(evt("state_changed", { to: "finished" }));
  return events;
}

function foldAll(events: RunEventDoc[]) {
  let state = initialRunView("run-x");
  for (const e of events) state = applyEvent(state, e);
  return state;
}

describe("run view reducer", () => {
  it("tracks stage, progress, and verdicts through a two-round debate", () => {
    const state = foldAll(debateRunEvents(2));
    expect(state.stage).toBe("finished");
    expect(state.completedUnits).toBe(2);
    expect(state.totalUnits).toBe(2);
    expect(state.transcript).toHaveLength(4);
    expect(state.verdicts).toHaveLength(1);
    expect(state.finalDecision).toBe("supported");
    expect(state.reportReady).toBe(true);
  });

  it("flags out-of-order sequence numbers for re-sync", () => {
    let state = initialRunView("run-x");
    state = applyEvent(state, { seq: 1, timestamp: "t", kind: "state_changed",
                                payload: { to: "created", hypothesis: {} } });
    state = applyEvent(state, { seq: 5, timestamp: "t", kind: "debate_turn",
                                payload: {} });
    expect(state.needsResync).toBe(true);
  });

  it("inserts an iteration divider and resets progress on revision", () => {
    seq = 0;
    let state = initialRunView("run-x");
    for (const e of [
      evt("state_changed", { to: "created", hypothesis: {} }),
      evt("state_changed", { to: "pre_experiment" }),
      evt("state_changed", { to: "experimenting", canonical: {},
                             spec: { units: [{ unit_id: "m0-t0" }], failures: [] } }),
      evt("unit_completed", { unit_id: "m0-t0", outcome: {} }),
      evt("state_changed", { to: "discussing" }),
      evt("verdict", { iteration: 0, verdict: { strategy: "adversarial",
                       decision: "insufficient", confidence: 0.2, iteration: 0 } }),
      evt("state_changed", { to: "revising", iteration: 1 }),
      evt("revision", { iteration: 1, plan: { n_trials: 6, fmax: 0.02 } }),
      evt("state_changed", { to: "pre_experiment" }),
    ]) state = applyEvent(state, e);
    expect(state.revisionDividers).toEqual([1]);
    expect(state.completedUnits).toBe(0);
    expect(state.totalUnits).toBe(0);
    expect(state.iteration).toBe(1);
  });
});

describe("render", () => {
  it("renders 4 bubbles and 1 ruling card for a 2-round adversarial run", () => {
    const state = foldAll(debateRunEvents(2));
    const container = document.createElement("div");
    document.body.appendChild(container);
    renderRun(container, state);
    expect(container.querySelectorAll(".bubble")).toHaveLength(4);
    expect(container.querySelectorAll(".ruling-card")).toHaveLength(1);
    expect(container.querySelector(".unit-progress")!.textContent).toBe("2/2 units");
  });

  it("renders ballots with the majority highlighted for voting runs", () => {
    seq = 0;
    let state = initialRunView("run-x");
    for (const e of [
      evt("state_changed", { to: "created", hypothesis: {} }),
      evt("state_changed", { to: "pre_experiment" }),
      evt("state_changed", { to: "experimenting", canonical: {},
                             spec: { units: [], failures: [] } }),
      evt("state_changed", { to: "discussing" }),
      ...[0, 1, 2, 3, 4].map((k) => evt("debate_turn", {
        iteration: 0, round_index: 0, role: `expert_${k}`,
        argument: { vote: k < 3 ? "yes" : "abstain", rationale: "r" },
      })),
      evt("verdict", { iteration: 0, verdict: { strategy: "voting",
                       decision: "supported", confidence: 1.0, iteration: 0 } }),
    ]) state = applyEvent(state, e);
    const container = document.createElement("div");
    renderRun(container, state);
    expect(container.querySelectorAll(".ballot")).toHaveLength(5);
    expect(container.querySelectorAll(".vote-badge.majority")).toHaveLength(3);
  });

  it("derives the same transcript from a snapshot as from the stream", () => {
    const streamed = foldAll(debateRunEvents(2));
    const snapshot: RunSnapshot = {
      run_id: "run-x", state: "finished", iteration: 0,
      hypothesis: { text: "x" },
      iterations: [{
        iteration: 0,
        spec: { spec_id: "s", units: [{ unit_id: "m0-t0" }, { unit_id: "m0-t1" }],
                failures: [] },
        results: { "m0-t0": {}, "m0-t1": {} },
        transcript: streamed.transcript.map(({ iteration, ...turn }) => turn),
        verdict: streamed.verdicts[0],
      }],
      final_decision: "supported",
      report: { final_decision: "supported" },
      error: null, last_seq: seq,
    };
    const polled = snapshotToView(snapshot);
    expect(polled.transcript).toEqual(streamed.transcript);
    expect(polled.verdicts).toEqual(streamed.verdicts);
    expect(polled.completedUnits).toBe(streamed.completedUnits);
  });
});
