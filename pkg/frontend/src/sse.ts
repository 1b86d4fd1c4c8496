/** Server-sent-events reader built on fetch streaming, so the same code
 * runs in the browser and under node-based tests (jsdom has no
 * EventSource). The orchestrator stream always replays from seq 1 and
 * closes itself with a `stream_end` frame after the run is terminal. */

export interface SseFrame {
  event: string;
  id: number | null;
  data: any;
}

export interface SseSubscription {
  /** Resolves when the stream ends (stream_end or connection close). */
  done: Promise<void>;
  close(): void;
}

export function subscribeEvents(
  url: string,
  onFrame: (frame: SseFrame) => void,
): SseSubscription {
  const controller = new AbortController();
  const done = (async () => {
    const res = await fetch(url, {
      signal: controller.signal,
      headers: { Accept: "text/event-stream" },
    });
    if (!res.ok || !res.body) {
      throw new Error(`event stream unavailable (${res.status})`);
    }
    const reader = res.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    for (;;) {
      const { value, done: eof } = await reader.read();
      if (eof) break;
      buffer += decoder.decode(value, { stream: true });
      let cut;
      while ((cut = buffer.indexOf("\n\n")) >= 0) {
        const raw = buffer.slice(0, cut);
        buffer = buffer.slice(cut + 2);
        const frame = parseFrame(raw);
        if (frame) {
          onFrame(frame);
          if (frame.event === "stream_end") {
            controller.abort();
            return;
          }
        }
      }
    }
  })().catch((err) => {
    if (controller.signal.aborted) return; // closed on purpose
    throw err;
  });
  return { done, close: () => controller.abort() };
}

function parseFrame(raw: string): SseFrame | null {
  let event = "message";
  let id: number | null = null;
  const dataLines: string[] = [];
  for (const line of raw.split("\n")) {
    if (line.startsWith("event: ")) event = line.slice(7).trim();
    else if (line.startsWith("id: ")) id = Number(line.slice(4).trim());
    else if (line.startsWith("data: ")) dataLines.push(line.slice(6));
    // comment lines and anything else are ignored
  }
  if (dataLines.length === 0) return null;
  try {
    return { event, id, data: JSON.parse(dataLines.join("\n")) };
  } catch {
    return null;
  }
}
