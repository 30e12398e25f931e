// View-model layer: assembles what the console renders from API responses
// and owns the preview polling loop. No DOM access here so it is testable
// headless; app.ts does the rendering.

import { ApiError, ParticipantJson, PickInstructionJson, ReportJson, SessionApi, SessionJson } from "./api.js";

export const PREVIEW_CELL_PX = 10;
export const DEFAULT_POLL_INTERVAL_MS = 3000;
export const BANNER_AFTER_FAILURES = 3;

export interface SessionViewModel {
  session: SessionJson;
  nextPicks: PickInstructionJson[];
  report: ReportJson | null;
  previewSvg: string;
  previewRows: number;
}

export function svgRowCount(svg: string, cellPx: number): number {
  const match = svg.match(/height="(\d+)"/);
  if (!match) {
    return 0;
  }
  return Math.floor(parseInt(match[1], 10) / cellPx);
}

export function answeredCount(p: ParticipantJson): number {
  return Object.keys(p.answers).length;
}

export function isComplete(p: ParticipantJson, questionCount: number): boolean {
  return answeredCount(p) === questionCount;
}

/** Assemble the whole console state from the GET endpoints. */
export async function loadSessionView(api: SessionApi, id: string): Promise<SessionViewModel> {
  const session = await api.getSession(id);
  if (session.mode !== "data") {
    // freeform sessions have no picks/report/preview endpoints to consult
    return { session, nextPicks: [], report: null, previewSvg: "", previewRows: 0 };
  }
  const [nextPicks, report, previewSvg] = await Promise.all([
    api.getNextPicks(id),
    api.getReport(id),
    api.getPreviewSvg(id, PREVIEW_CELL_PX),
  ]);
  return {
    session,
    nextPicks,
    report,
    previewSvg,
    previewRows: svgRowCount(previewSvg, PREVIEW_CELL_PX),
  };
}

export type ActionResult =
  | { ok: true; view: SessionViewModel }
  | { ok: false; error: ApiError };

/** POST an answer; on success refetch the full view, on a 4xx return the
 * error for inline display next to the control that caused it. */
export async function submitAnswerAction(
  api: SessionApi,
  id: string,
  participantId: string,
  questionIndex: number,
  optionIndex: number,
): Promise<ActionResult> {
  try {
    await api.submitAnswer(id, participantId, questionIndex, optionIndex);
  } catch (error) {
    if (error instanceof ApiError) {
      return { ok: false, error };
    }
    throw error;
  }
  return { ok: true, view: await loadSessionView(api, id) };
}

export async function submitFreeformAction(
  api: SessionApi,
  id: string,
  participantId: string,
  colorName: string,
): Promise<ActionResult> {
  try {
    await api.submitFreeformPick(id, participantId, colorName);
  } catch (error) {
    if (error instanceof ApiError) {
      return { ok: false, error };
    }
    throw error;
  }
  return { ok: true, view: await loadSessionView(api, id) };
}

export interface PollerCallbacks {
  onUpdate: (svg: string, rows: number) => void;
  onBanner: (message: string) => void;
  onStop?: () => void;
}

/** Refetches the preview at a fixed interval; retries on failure and raises a
 * banner after three consecutive failures; stops once the session closes. */
export class PreviewPoller {
  private timer: ReturnType<typeof setInterval> | null = null;
  private failures = 0;
  private stopped = false;

  constructor(
    private readonly api: SessionApi,
    private readonly sessionId: string,
    private readonly callbacks: PollerCallbacks,
    private readonly intervalMs: number = DEFAULT_POLL_INTERVAL_MS,
  ) {}

  start(): void {
    if (this.timer !== null || this.stopped) {
      return;
    }
    this.timer = setInterval(() => {
      void this.pollOnce();
    }, this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
    if (!this.stopped) {
      this.stopped = true;
      this.callbacks.onStop?.();
    }
  }

  get isStopped(): boolean {
    return this.stopped;
  }

  async pollOnce(): Promise<void> {
    if (this.stopped) {
      return;
    }
    try {
      const session = await this.api.getSession(this.sessionId);
      if (session.mode === "data") {
        const svg = await this.api.getPreviewSvg(this.sessionId, PREVIEW_CELL_PX);
        this.callbacks.onUpdate(svg, svgRowCount(svg, PREVIEW_CELL_PX));
      }
      this.failures = 0;
      if (session.closed) {
        this.stop();
      }
    } catch {
      this.failures += 1;
      if (this.failures >= BANNER_AFTER_FAILURES) {
        this.callbacks.onBanner(`preview unavailable after ${this.failures} attempts`);
      }
    }
  }
}
