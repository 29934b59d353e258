/** Typed client for the game service's /v1 HTTP surface. */

export interface RenderItem {
  id: number;
  glyph: string;
  fill: string;
  x: number;
  y: number;
  size: number;
}

export interface RenderArrow {
  from: number;
  to: number;
  label: string;
}

export interface RenderSpec {
  width: number;
  height: number;
  items: RenderItem[];
  arrows: RenderArrow[];
}

export interface QuestionView {
  turn: number;
  text: string;
  kind: "polar" | "what";
  answers: string[];
}

export interface GuessView {
  scene_id: number;
  stop_reason: string;
}

export interface DebugView {
  posterior: string[];
  entropy_bits: string;
  top_questions: { text: string; eig_bits: string }[];
}

export interface GameState {
  game_id: string;
  status: "awaiting_description" | "awaiting_answer" | "finished";
  k: number;
  target_id: number;
  strategy: string;
  include_what: boolean;
  turn: number;
  max_questions: number;
  scenes: RenderSpec[];
  question: QuestionView | null;
  guess: GuessView | null;
  debug?: DebugView;
}

export interface CreateParams {
  k?: number;
  strategy?: string;
  include_what?: boolean;
  epsilon?: number;
  entropy_threshold_bits?: number;
  max_questions?: number;
  context_mode?: string;
  describe?: boolean;
  seed?: number;
}

/** Structured service error ({"error": {code, message}} envelope). */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface AnswerResult {
  state: GameState;
  /** exact response body, for duplicate-submission comparisons */
  raw: string;
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class Api {
  private readonly fetchImpl: FetchLike;

  constructor(
    readonly base: string,
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((url, init) => globalThis.fetch(url, init));
  }

  private async request(method: string, path: string, body?: unknown): Promise<string> {
    const init: RequestInit = { method, headers: { "Content-Type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const resp = await this.fetchImpl(`${this.base}/v1${path}`, init);
    const text = await resp.text();
    if (!resp.ok) {
      let code = "unknown_error";
      let message = text || resp.statusText;
      try {
        const parsed = JSON.parse(text);
        code = parsed?.error?.code ?? code;
        message = parsed?.error?.message ?? message;
      } catch {
        /* non-JSON error body: keep the raw text */
      }
      throw new ApiError(resp.status, code, message);
    }
    return text;
  }

  async createGame(params: CreateParams): Promise<GameState> {
    return JSON.parse(await this.request("POST", "/games", params));
  }

  async getGame(gameId: string): Promise<GameState> {
    return JSON.parse(await this.request("GET", `/games/${gameId}`));
  }

  async postAnswer(gameId: string, answer: string, idempotencyKey: string): Promise<AnswerResult> {
    const raw = await this.request("POST", `/games/${gameId}/answers`, {
      answer,
      idempotency_key: idempotencyKey,
    });
    return { state: JSON.parse(raw), raw };
  }

  async postDescription(gameId: string, text: string): Promise<GameState> {
    return JSON.parse(await this.request("POST", `/games/${gameId}/description`, { text }));
  }

  async getTranscript(gameId: string): Promise<unknown> {
    return JSON.parse(await this.request("GET", `/games/${gameId}/transcript`));
  }
}
