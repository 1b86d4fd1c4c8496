/** Shapes of the orchestrator API payloads the dashboard consumes. */

export interface RunEventDoc {
  seq: number;
  timestamp: string;
  kind: string;
  payload: Record<string, any>;
}

export interface RunSummary {
  run_id: string;
  state: string;
  iteration: number;
  final_decision: string | null;
  hypothesis_text: string;
  updated_at?: string;
}

export interface RunSnapshot {
  run_id: string;
  state: string;
  iteration: number;
  hypothesis: { text: string };
  iterations: IterationRecord[];
  final_decision: string | null;
  report: Record<string, any> | null;
  error: string | null;
  last_seq: number;
}

export interface IterationRecord {
  iteration: number;
  spec: { spec_id: string; units: { unit_id: string }[]; failures: unknown[] };
  results: Record<string, unknown>;
  transcript: TranscriptTurn[];
  verdict: VerdictDoc | null;
}

export interface TranscriptTurn {
  round_index: number;
  role: string;
  argument: Record<string, any>;
}

export interface VerdictDoc {
  strategy: string;
  decision: string;
  confidence: number;
  iteration: number;
}

export interface ApiError {
  code: string;
  message?: string;
  diagnostics?: string[];
}
