/** DOM rendering: full repaint of the run panel from a RunViewState.
 * Roles map to bubble classes; expert ballots get vote badges with the
 * majority side highlighted once a verdict exists. */

import type { RunViewState, TranscriptEntry, VerdictView } from "./model.js";

const DECISION_TO_VOTE: Record<string, string> = { supported: "yes", refuted: "no" };

export function renderRun(container: HTMLElement, state: RunViewState): void {
  container.replaceChildren();
  container.appendChild(renderHeader(container.ownerDocument, state));
  container.appendChild(renderTranscript(container.ownerDocument, state));
  if (state.errorMessage) {
    const banner = container.ownerDocument.createElement("div");
    banner.className = "error-banner";
    banner.textContent = state.errorMessage;
    container.appendChild(banner);
  }
}

function renderHeader(doc: Document, state: RunViewState): HTMLElement {
  const header = doc.createElement("div");
  header.className = "run-header";

  const badge = doc.createElement("span");
  badge.className = `stage-badge stage-${state.stage}`;
  badge.textContent = state.stage;
  header.appendChild(badge);

  const progress = doc.createElement("span");
  progress.className = "unit-progress";
  progress.textContent = `${state.completedUnits}/${state.totalUnits} units`;
  header.appendChild(progress);

  const iteration = doc.createElement("span");
  iteration.className = "iteration-counter";
  iteration.textContent = `iteration ${state.iteration}`;
  header.appendChild(iteration);

  const mode = doc.createElement("span");
  mode.className = state.live ? "feed-live" : "feed-polling";
  mode.textContent = state.live ? "live" : "polling";
  header.appendChild(mode);

  if (state.reportReady) {
    const link = doc.createElement("a");
    link.className = "report-link";
    link.href = `/api/runs/${state.runId}`;
    link.textContent = `final report: ${state.finalDecision}`;
    header.appendChild(link);
  }
  return header;
}

function renderTranscript(doc: Document, state: RunViewState): HTMLElement {
  const panel = doc.createElement("div");
  panel.className = "transcript-panel";

  const iterations = new Set<number>([
    ...state.transcript.map((t) => t.iteration),
    ...state.verdicts.map((v) => v.iteration),
  ]);
  for (const iteration of [...iterations].sort((a, b) => a - b)) {
    if (state.revisionDividers.includes(iteration)) {
      const divider = doc.createElement("div");
      divider.className = "iteration-divider";
      divider.textContent = `revised plan — iteration ${iteration}`;
      panel.appendChild(divider);
    }
    const verdict = state.verdicts.find((v) => v.iteration === iteration) ?? null;
    const turns = state.transcript.filter((t) => t.iteration === iteration);
    for (const turn of groupByRound(turns)) {
      panel.appendChild(renderTurn(doc, turn, verdict));
    }
    if (verdict) panel.appendChild(renderVerdictCard(doc, verdict));
  }
  return panel;
}

function groupByRound(turns: TranscriptEntry[]): TranscriptEntry[] {
  return [...turns].sort((a, b) =>
    a.round_index - b.round_index || a.role.localeCompare(b.role));
}

function renderTurn(doc: Document, turn: TranscriptEntry,
                    verdict: VerdictView | null): HTMLElement {
  const isBallot = turn.role.startsWith("expert_");
  const el = doc.createElement("div");
  if (isBallot) {
    el.className = "ballot";
    const vote = String(turn.argument.vote ?? "abstain");
    const badge = doc.createElement("span");
    badge.className = `vote-badge vote-${vote}`;
    if (verdict && DECISION_TO_VOTE[verdict.decision] === vote) {
      badge.classList.add("majority");
    }
    badge.textContent = vote;
    el.appendChild(badge);
    const who = doc.createElement("span");
    who.className = "role-label";
    who.textContent = turn.role;
    el.appendChild(who);
    const why = doc.createElement("span");
    why.className = "ballot-rationale";
    why.textContent = String(turn.argument.rationale ?? "");
    el.appendChild(why);
  } else {
    el.className = `bubble bubble-${turn.role}`;
    const who = doc.createElement("span");
    who.className = "role-label";
    who.textContent = `${turn.role} · round ${turn.round_index}`;
    el.appendChild(who);
    const text = doc.createElement("p");
    text.textContent = String(turn.argument.text ?? "");
    el.appendChild(text);
  }
  return el;
}

function renderVerdictCard(doc: Document, verdict: VerdictView): HTMLElement {
  const card = doc.createElement("div");
  card.className = `ruling-card decision-${verdict.decision}`;
  const decision = doc.createElement("strong");
  decision.textContent = verdict.decision;
  card.appendChild(decision);
  const confidence = doc.createElement("span");
  confidence.className = "confidence";
  confidence.textContent = `confidence ${verdict.confidence.toFixed(3)}`;
  card.appendChild(confidence);
  const strategy = doc.createElement("span");
  strategy.className = "strategy-label";
  strategy.textContent = verdict.strategy;
  card.appendChild(strategy);
  return card;
}

export function renderRunList(container: HTMLElement,
                              runs: { run_id: string; state: string;
                                      hypothesis_text: string;
                                      final_decision: string | null }[],
                              onOpen: (runId: string) => void): void {
  container.replaceChildren();
  for (const run of runs) {
    const row = container.ownerDocument.createElement("div");
    row.className = "run-row";
    const link = container.ownerDocument.createElement("a");
    link.href = `#/run/${run.run_id}`;
    link.textContent = run.hypothesis_text || run.run_id;
    link.addEventListener("click", (ev) => {
      ev.preventDefault();
      onOpen(run.run_id);
    });
    row.appendChild(link);
    const status = container.ownerDocument.createElement("span");
    status.className = `run-status stage-${run.state}`;
    status.textContent = run.final_decision ?? run.state;
    row.appendChild(status);
    container.appendChild(row);
  }
}
