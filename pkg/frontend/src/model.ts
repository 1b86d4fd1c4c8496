/** Pure view state for one run, folded from the event stream (or rebuilt
 * from a snapshot when polling). Nothing here invents values: every field
 * is copied or counted from API payloads. */

import type { RunEventDoc, RunSnapshot, TranscriptTurn, VerdictDoc } from "./types.js";

export interface TranscriptEntry extends TranscriptTurn {
  iteration: number;
}

export interface VerdictView extends VerdictDoc {}

export interface RunViewState {
  runId: string;
  stage: string;
  iteration: number;
  completedUnits: number;
  totalUnits: number;
  transcript: TranscriptEntry[];
  revisionDividers: number[]; // iterations that begin after a revision
  verdicts: VerdictView[];
  finalDecision: string | null;
  reportReady: boolean;
  errorMessage: string | null;
  lastSeq: number;
  needsResync: boolean;
  live: boolean; // true when fed by the event stream, false when polling
}

export function initialRunView(runId: string): RunViewState {
  return {
    runId,
    stage: "created",
    iteration: 0,
    completedUnits: 0,
    totalUnits: 0,
    transcript: [],
    revisionDividers: [],
    verdicts: [],
    finalDecision: null,
    reportReady: false,
    errorMessage: null,
    lastSeq: 0,
    needsResync: false,
    live: true,
  };
}

/** Fold one event; returns a new state. Out-of-order sequence numbers set
 * needsResync so the caller refetches the snapshot and restarts. */
export function applyEvent(state: RunViewState, event: RunEventDoc): RunViewState {
  if (event.seq !== state.lastSeq + 1) {
    return { ...state, needsResync: true };
  }
  const next: RunViewState = { ...state, lastSeq: event.seq };
  const p = event.payload;

  switch (event.kind) {
    case "state_changed": {
      next.stage = p.to;
      if (p.to === "revising") {
        next.iteration = p.iteration;
        next.revisionDividers = [...state.revisionDividers, p.iteration];
        next.completedUnits = 0;
        next.totalUnits = 0;
      }
      if (p.to === "experimenting") {
        next.totalUnits = p.spec.units.length;
        next.completedUnits = 0;
      }
      if (p.to === "reporting" && p.final_decision) {
        next.finalDecision = p.final_decision;
      }
      break;
    }
    case "unit_completed":
    case "unit_failed":
      next.completedUnits = state.completedUnits + 1;
      break;
    case "debate_turn":
      next.transcript = [...state.transcript, {
        iteration: p.iteration,
        round_index: p.round_index,
        role: p.role,
        argument: p.argument,
      }];
      break;
    case "verdict":
      next.verdicts = [...state.verdicts, p.verdict as VerdictView];
      break;
    case "report_ready":
      next.reportReady = true;
      next.finalDecision = p.report.final_decision;
      break;
    case "error":
      next.errorMessage = p.message;
      break;
    default:
      break; // revision payloads render via the divider added on "revising"
  }
  return next;
}

/** Rebuild the same view shape from a run snapshot (polling fallback and
 * stream re-sync both go through here). */
export function snapshotToView(snapshot: RunSnapshot): RunViewState {
  const view = initialRunView(snapshot.run_id);
  view.live = false;
  view.stage = snapshot.state;
  view.iteration = snapshot.iteration;
  view.lastSeq = snapshot.last_seq;
  view.finalDecision = snapshot.final_decision;
  view.reportReady = snapshot.report !== null;
  view.errorMessage = snapshot.error;
  for (const record of snapshot.iterations ?? []) {
    if (record.iteration > 0 && !view.revisionDividers.includes(record.iteration)) {
      view.revisionDividers.push(record.iteration);
    }
    for (const turn of record.transcript) {
      view.transcript.push({ iteration: record.iteration, ...turn });
    }
    if (record.verdict) view.verdicts.push(record.verdict);
  }
  const current = (snapshot.iterations ?? [])[snapshot.iterations.length - 1];
  if (current) {
    view.totalUnits = current.spec.units.length;
    view.completedUnits = Object.keys(current.results).length;
  }
  return view;
}

export const TERMINAL_STAGES = ["finished", "aborted"];

export function isTerminal(state: RunViewState): boolean {
  return TERMINAL_STAGES.includes(state.stage);
}
