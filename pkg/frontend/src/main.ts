/** App wiring: hash routing between the submit page and run pages, event
 * streaming with snapshot re-sync, and a 1 s polling fallback when the
 * stream is unavailable. */

import { ApiClient } from "./api.js";
import {
  applyEvent,
  initialRunView,
  isTerminal,
  snapshotToView,
  type RunViewState,
} from "./model.js";
import { buildSubmitForm, wireSubmitForm } from "./form.js";
import { renderRun, renderRunList } from "./render.js";
import { subscribeEvents, type SseSubscription } from "./sse.js";

const POLL_FALLBACK_MS = 1000;

export interface App {
  navigate(hash: string): void;
  openRun(runId: string): void;
  /** Drop local state and rebuild from the stream; used by tests and by
   * the out-of-order re-sync path. */
  reconnect(): Promise<void>;
  currentState(): RunViewState | null;
  whenSettled(): Promise<void>;
  close(): void;
}

export function boot(doc: Document, baseUrl = ""): App {
  const api = new ApiClient(baseUrl);
  const root = doc.getElementById("app") ?? doc.body;

  const homePanel = doc.createElement("div");
  homePanel.className = "home-panel";
  const form = buildSubmitForm(doc);
  homePanel.appendChild(form.root);
  const runList = doc.createElement("div");
  runList.className = "run-list";
  homePanel.appendChild(runList);

  const runPanel = doc.createElement("div");
  runPanel.className = "run-panel";

  root.replaceChildren(homePanel, runPanel);

  let state: RunViewState | null = null;
  let subscription: SseSubscription | null = null;
  let pollTimer: ReturnType<typeof setTimeout> | null = null;
  let settled: Promise<void> = Promise.resolve();

  function stopFeeds(): void {
    subscription?.close();
    subscription = null;
    if (pollTimer !== null) clearTimeout(pollTimer);
    pollTimer = null;
  }

  function showHome(): void {
    stopFeeds();
    state = null;
    homePanel.style.display = "";
    runPanel.style.display = "none";
    void api.listRuns().then((runs) =>
      renderRunList(runList, runs, (id) => app.openRun(id)),
    ).catch(() => renderRunList(runList, [], () => undefined));
  }

  function paint(): void {
    if (state) renderRun(runPanel, state);
  }

  async function resyncFromSnapshot(runId: string): Promise<void> {
    const snapshot = await api.getRun(runId);
    state = snapshotToView(snapshot);
    paint();
    if (!isTerminal(state)) schedulePoll(runId);
  }

  function schedulePoll(runId: string): void {
    pollTimer = setTimeout(() => {
      void resyncFromSnapshot(runId).catch(() => schedulePoll(runId));
    }, POLL_FALLBACK_MS);
  }

  function streamRun(runId: string): Promise<void> {
    state = initialRunView(runId);
    paint();
    subscription = subscribeEvents(api.eventsUrl(runId), (frame) => {
      if (frame.event === "stream_end" || !state) return;
      state = applyEvent(state, {
        seq: frame.id ?? 0,
        timestamp: "",
        kind: frame.event,
        payload: frame.data,
      });
      if (state.needsResync) {
        // order broke: rebuild from the snapshot, then re-stream from seq 1
        stopFeeds();
        void resyncFromSnapshot(runId).then(() => {
          if (state && !isTerminal(state)) settled = streamRun(runId);
        });
        return;
      }
      paint();
    });
    return subscription.done.catch(() => {
      // stream unavailable: degrade to 1 s polling
      void resyncFromSnapshot(runId).catch(() => schedulePoll(runId));
    });
  }

  function openRun(runId: string): void {
    stopFeeds();
    homePanel.style.display = "none";
    runPanel.style.display = "";
    settled = streamRun(runId);
  }

  function route(): void {
    const hash = doc.defaultView?.location.hash ?? "";
    const match = hash.match(/^#\/run\/(.+)$/);
    if (match) openRun(match[1]);
    else showHome();
  }

  doc.defaultView?.addEventListener("hashchange", route);

  const app: App = {
    navigate(hash: string): void {
      if (doc.defaultView) doc.defaultView.location.hash = hash;
      route();
    },
    openRun(runId: string): void {
      if (doc.defaultView) doc.defaultView.location.hash = `#/run/${runId}`;
      openRun(runId);
    },
    async reconnect(): Promise<void> {
      const runId = state?.runId;
      if (!runId) return;
      stopFeeds();
      settled = streamRun(runId);
      await settled;
    },
    currentState: () => state,
    whenSettled: () => settled,
    close: stopFeeds,
  };

  wireSubmitForm(form, api, (runId) => app.openRun(runId));
  route();
  return app;
}

declare global {
  interface Window {
    labloopApp?: App;
  }
}

// browser entry point; tests call boot() themselves
if (typeof window !== "undefined" && typeof process === "undefined") {
  window.labloopApp = boot(window.document);
}
