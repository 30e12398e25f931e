// Typed client for the session HTTP API. The UI never recomputes encode or
// decode logic: every displayed value comes from one of these endpoints.

export type Rgb = [number, number, number];

export interface YarnColorJson {
  name: string;
  rgb: Rgb;
}

export interface QuestionJson {
  id: string;
  prompt: string;
  options: string[];
}

export interface QuestionnaireJson {
  id: string;
  title: string;
  questions: QuestionJson[];
}

export interface PaletteJson {
  option_colors: YarnColorJson[];
  boundary: YarnColorJson;
  warp: YarnColorJson;
}

export interface SessionConfigJson {
  warp_ends: number;
  picks_per_answer: number;
  boundary_picks: number;
  rows_per_pick: number;
}

export interface ParticipantJson {
  participant_id: string;
  label: string;
  answers: Record<string, number>; // question index -> option index
}

export type SessionMode = "data" | "freeform";

export interface SessionJson {
  session_id: string;
  mode: SessionMode;
  closed: boolean;
  questionnaire: QuestionnaireJson;
  palette: PaletteJson;
  config: SessionConfigJson;
  participants: ParticipantJson[];
  freeform_picks: { participant_id: string; color_name: string }[];
  current_participant_id: string | null;
}

export interface PickInstructionJson {
  yarn: string;
  rgb: Rgb;
  count: number;
  purpose: "answer" | "boundary";
  prompt: string | null;
}

export interface ReportQuestionJson {
  question_id: string;
  prompt: string;
  answered: number;
  counts: number[];
}

export interface ReportJson {
  participants_total: number;
  questions: ReportQuestionJson[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string,
  ) {
    super(`${code}: ${detail}`);
    this.name = "ApiError";
  }
}

/** The surface the view layer depends on; ApiClient is the real implementation. */
export interface SessionApi {
  createSession(
    questionnaire: QuestionnaireJson,
    palette: PaletteJson,
    mode: SessionMode,
    config: Partial<SessionConfigJson>,
  ): Promise<string>;
  getSession(id: string): Promise<SessionJson>;
  addParticipant(id: string, label: string): Promise<string>;
  submitAnswer(id: string, participantId: string, questionIndex: number, optionIndex: number): Promise<void>;
  submitFreeformPick(id: string, participantId: string, colorName: string): Promise<void>;
  closeSession(id: string): Promise<void>;
  getNextPicks(id: string): Promise<PickInstructionJson[]>;
  getPreviewSvg(id: string, cellPx: number): Promise<string>;
  getReport(id: string): Promise<ReportJson>;
  getDraftWif(id: string): Promise<string>;
}

export class ApiClient implements SessionApi {
  constructor(readonly baseUrl: string = "") {}

  private async request(method: string, path: string, body?: unknown): Promise<Response> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = `HTTP${response.status}`;
      let detail = response.statusText;
      try {
        const parsed = await response.json();
        if (parsed && typeof parsed.error === "string") {
          code = parsed.error;
          detail = String(parsed.detail ?? "");
        }
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, code, detail);
    }
    return response;
  }

  async createSession(
    questionnaire: QuestionnaireJson,
    palette: PaletteJson,
    mode: SessionMode,
    config: Partial<SessionConfigJson> = {},
  ): Promise<string> {
    const response = await this.request("POST", "/api/sessions", { questionnaire, palette, mode, config });
    const body = await response.json();
    return body.session_id as string;
  }

  async getSession(id: string): Promise<SessionJson> {
    const response = await this.request("GET", `/api/sessions/${id}`);
    return (await response.json()) as SessionJson;
  }

  async addParticipant(id: string, label: string): Promise<string> {
    const response = await this.request("POST", `/api/sessions/${id}/participants`, { label });
    const body = await response.json();
    return body.participant_id as string;
  }

  async submitAnswer(id: string, participantId: string, questionIndex: number, optionIndex: number): Promise<void> {
    await this.request("POST", `/api/sessions/${id}/answers`, {
      participant_id: participantId,
      question_index: questionIndex,
      option_index: optionIndex,
    });
  }

  async submitFreeformPick(id: string, participantId: string, colorName: string): Promise<void> {
    await this.request("POST", `/api/sessions/${id}/freeform-picks`, {
      participant_id: participantId,
      color_name: colorName,
    });
  }

  async closeSession(id: string): Promise<void> {
    await this.request("POST", `/api/sessions/${id}/close`);
  }

  async getNextPicks(id: string): Promise<PickInstructionJson[]> {
    const response = await this.request("GET", `/api/sessions/${id}/next-picks`);
    const body = await response.json();
    return body.picks as PickInstructionJson[];
  }

  async getPreviewSvg(id: string, cellPx: number): Promise<string> {
    const response = await this.request("GET", `/api/sessions/${id}/preview.svg?cell_px=${cellPx}`);
    return await response.text();
  }

  async getReport(id: string): Promise<ReportJson> {
    const response = await this.request("GET", `/api/sessions/${id}/report`);
    return (await response.json()) as ReportJson;
  }

  async getDraftWif(id: string): Promise<string> {
    const response = await this.request("GET", `/api/sessions/${id}/draft.wif`);
    return await response.text();
  }
}
