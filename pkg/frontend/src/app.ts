/** Game screen and session flow: one active game per page, sequential calls. */

import { Api, ApiError } from "./api.js";
import type { CreateParams, GameState } from "./api.js";
import { renderScene } from "./render.js";

export interface AppError {
  message: string;
  /** re-runs the failed request with its original idempotency key */
  retry: (() => void) | null;
  /** true when the session is gone and only a restart makes sense */
  expired: boolean;
}

export interface AppState {
  screen: "config" | "game";
  game: GameState | null;
  busy: boolean;
  error: AppError | null;
}

export const STRATEGIES = ["eig", "full_caption_eig", "random"] as const;
export const CONTEXT_MODES = ["random", "split", "distinct"] as const;

const DEFAULT_PARAMS: CreateParams = {
  k: 10,
  strategy: "eig",
  epsilon: 0.01,
  entropy_threshold_bits: 1.0,
  max_questions: 20,
  context_mode: "random",
  include_what: false,
  describe: false,
};

/** k=10 gives the 2x5 grid; larger contexts wrap at five columns. */
export function gridColumns(k: number): number {
  return k <= 12 ? Math.ceil(k / 2) : 5;
}

export class App {
  readonly state: AppState = { screen: "config", game: null, busy: false, error: null };
  private params: CreateParams = { ...DEFAULT_PARAMS };
  private descriptionDraft = "";
  private readonly doc: Document;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: Api,
  ) {
    this.doc = root.ownerDocument;
    this.doc.addEventListener("keydown", (ev) => this.handleKey(ev as KeyboardEvent));
    this.render();
  }

  /** y / n / space answer the pending polar question. */
  handleKey(ev: KeyboardEvent): void {
    const game = this.state.game;
    if (this.state.busy || this.state.screen !== "game") return;
    if (!game || game.status !== "awaiting_answer") return;
    if (game.question?.kind !== "polar") return;
    const key = ev.key.toLowerCase();
    const answer = key === "y" ? "yes" : key === "n" ? "no" : key === " " ? "na" : null;
    if (answer === null) return;
    ev.preventDefault();
    void this.submitAnswer(answer);
  }

  private update(patch: Partial<AppState>): void {
    Object.assign(this.state, patch);
    this.render();
  }

  private fail(err: unknown, retry: (() => void) | null): void {
    if (err instanceof ApiError) {
      const expired = err.code === "unknown_game";
      // structured rejections leave the turn open: answering again is the retry
      const keepRetry = expired ? null : err.status >= 500 ? retry : null;
      this.update({
        busy: false,
        error: { message: `${err.code}: ${err.message}`, retry: keepRetry, expired },
      });
      return;
    }
    const message = err instanceof Error ? err.message : String(err);
    this.update({
      busy: false,
      error: { message: `network error: ${message}`, retry, expired: false },
    });
  }

  async startGame(params?: CreateParams): Promise<void> {
    if (this.state.busy) return;
    if (params) this.params = { ...this.params, ...params };
    const attempt = { ...this.params };
    this.update({ busy: true, error: null });
    try {
      const game = await this.api.createGame(attempt);
      this.descriptionDraft = "";
      this.update({ screen: "game", game, busy: false, error: null });
    } catch (err) {
      this.fail(err, () => void this.startGame());
    }
  }

  async submitDescription(text: string): Promise<void> {
    const game = this.state.game;
    if (!game || this.state.busy) return;
    this.descriptionDraft = text;
    this.update({ busy: true, error: null });
    try {
      const next = await this.api.postDescription(game.game_id, text);
      this.descriptionDraft = "";
      this.update({ game: next, busy: false, error: null });
    } catch (err) {
      this.fail(err, null);
    }
  }

  async submitAnswer(answer: string): Promise<void> {
    const game = this.state.game;
    if (!game?.question || this.state.busy) return;
    // one submission per question: the key is fixed by the turn, so a retry
    // after a network failure can only replay, never double-consume
    const key = `${game.game_id}-t${game.question.turn}`;
    await this.performAnswer(game.game_id, answer, key);
  }

  private async performAnswer(gameId: string, answer: string, key: string): Promise<void> {
    this.update({ busy: true, error: null });
    try {
      const { state } = await this.api.postAnswer(gameId, answer, key);
      this.update({ game: state, busy: false, error: null });
    } catch (err) {
      this.fail(err, () => void this.performAnswer(gameId, answer, key));
    }
  }

  restart(): void {
    this.state.game = null;
    this.descriptionDraft = "";
    this.update({ screen: "config", busy: false, error: null });
  }

  // ---- rendering ----------------------------------------------------------

  private el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    attrs: Record<string, string> = {},
    text?: string,
  ): HTMLElementTagNameMap[K] {
    const node = this.doc.createElement(tag);
    for (const [name, value] of Object.entries(attrs)) node.setAttribute(name, value);
    if (text !== undefined) node.textContent = text;
    return node;
  }

  private render(): void {
    this.root.textContent = "";
    const screen =
      this.state.screen === "config" ? this.renderConfig() : this.renderGame();
    this.root.appendChild(screen);
    const error = this.renderError();
    if (error) this.root.appendChild(error);
  }

  private renderError(): HTMLElement | null {
    const error = this.state.error;
    if (!error) return null;
    const bar = this.el("div", { class: "error-bar", role: "alert" });
    bar.appendChild(this.el("span", { class: "error-message" }, error.message));
    if (error.retry) {
      const retry = this.el("button", { id: "retry-btn", type: "button" }, "Retry");
      retry.addEventListener("click", () => error.retry && error.retry());
      bar.appendChild(retry);
    }
    if (error.expired) {
      const restart = this.el("button", { id: "restart-btn", type: "button" }, "Start over");
      restart.addEventListener("click", () => this.restart());
      bar.appendChild(restart);
    }
    return bar;
  }

  private renderConfig(): HTMLElement {
    const wrap = this.el("div", { class: "config-screen" });
    wrap.appendChild(this.el("h1", {}, "twentyq"));
    wrap.appendChild(
      this.el(
        "p",
        { class: "tagline" },
        "Pick a secret scene; the model asks questions and guesses it.",
      ),
    );
    const form = this.el("form", { id: "config-form" });

    const field = (label: string, input: HTMLElement): HTMLElement => {
      const row = this.el("label", { class: "field" });
      row.appendChild(this.el("span", {}, label));
      row.appendChild(input);
      return row;
    };
    const p = this.params;

    const k = this.el("input", { id: "cfg-k", type: "number", min: "2", value: String(p.k) });
    const strategy = this.el("select", { id: "cfg-strategy" });
    for (const name of STRATEGIES) {
      const opt = this.el("option", { value: name }, name);
      if (name === p.strategy) opt.setAttribute("selected", "selected");
      strategy.appendChild(opt);
    }
    const mode = this.el("select", { id: "cfg-mode" });
    for (const name of CONTEXT_MODES) {
      const opt = this.el("option", { value: name }, name);
      if (name === p.context_mode) opt.setAttribute("selected", "selected");
      mode.appendChild(opt);
    }
    const epsilon = this.el("input", {
      id: "cfg-epsilon",
      type: "number",
      step: "0.01",
      min: "0",
      max: "1",
      value: String(p.epsilon),
    });
    const threshold = this.el("input", {
      id: "cfg-threshold",
      type: "number",
      step: "0.1",
      min: "0",
      value: String(p.entropy_threshold_bits),
    });
    const maxQ = this.el("input", {
      id: "cfg-max-questions",
      type: "number",
      min: "0",
      value: String(p.max_questions),
    });
    const seed = this.el("input", { id: "cfg-seed", type: "text", placeholder: "random" });
    const describe = this.el("input", { id: "cfg-describe", type: "checkbox" });
    if (p.describe) describe.setAttribute("checked", "checked");
    const what = this.el("input", { id: "cfg-what", type: "checkbox" });
    if (p.include_what) what.setAttribute("checked", "checked");

    form.appendChild(field("Scenes (k)", k));
    form.appendChild(field("Strategy", strategy));
    form.appendChild(field("Context mode", mode));
    form.appendChild(field("Answer noise", epsilon));
    form.appendChild(field("Stop below (bits)", threshold));
    form.appendChild(field("Question budget", maxQ));
    form.appendChild(field("Seed", seed));
    form.appendChild(field("Describe the target first", describe));
    form.appendChild(field("Allow what-questions", what));

    const start = this.el("button", { id: "cfg-start", type: "submit" }, "Start game");
    if (this.state.busy) start.setAttribute("disabled", "disabled");
    form.appendChild(start);

    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      const params: CreateParams = {
        k: Number(k.value),
        strategy: strategy.value,
        context_mode: mode.value,
        epsilon: Number(epsilon.value),
        entropy_threshold_bits: Number(threshold.value),
        max_questions: Number(maxQ.value),
        describe: describe.checked,
        include_what: what.checked,
      };
      if (seed.value.trim() !== "") params.seed = Number(seed.value.trim());
      else delete this.params.seed;
      void this.startGame(params);
    });
    wrap.appendChild(form);
    return wrap;
  }

  private renderGame(): HTMLElement {
    const game = this.state.game;
    const wrap = this.el("div", { class: "game-screen" });
    if (!game) return wrap;

    const status = this.el("div", { class: "status-row" });
    const asked = game.turn;
    status.appendChild(
      this.el(
        "span",
        { id: "turn-counter" },
        `Questions: ${asked} / ${game.max_questions}`,
      ),
    );
    const newGame = this.el("button", { id: "new-game", type: "button" }, "New game");
    newGame.addEventListener("click", () => this.restart());
    status.appendChild(newGame);
    wrap.appendChild(status);

    wrap.appendChild(this.renderBanner(game));
    wrap.appendChild(this.renderGrid(game));
    const debug = this.renderDebug(game);
    if (debug) wrap.appendChild(debug);
    return wrap;
  }

  private renderBanner(game: GameState): HTMLElement {
    const banner = this.el("div", { class: "banner" });
    if (game.status === "awaiting_description") {
      banner.appendChild(
        this.el("p", { class: "prompt" }, "Describe your target scene to start:"),
      );
      const form = this.el("form", { id: "describe-form" });
      const input = this.el("input", {
        id: "describe-input",
        type: "text",
        placeholder: "e.g. a red square",
        value: this.descriptionDraft,
      });
      input.addEventListener("input", () => {
        this.descriptionDraft = (input as HTMLInputElement).value;
      });
      const send = this.el("button", { id: "describe-submit", type: "submit" }, "Send");
      if (this.state.busy) {
        input.setAttribute("disabled", "disabled");
        send.setAttribute("disabled", "disabled");
      }
      form.addEventListener("submit", (ev) => {
        ev.preventDefault();
        void this.submitDescription((input as HTMLInputElement).value);
      });
      form.appendChild(input);
      form.appendChild(send);
      banner.appendChild(form);
      return banner;
    }
    if (game.status === "awaiting_answer" && game.question) {
      const q = game.question;
      banner.appendChild(this.el("p", { id: "question-text" }, q.text));
      if (q.kind === "polar") {
        const row = this.el("div", { class: "answer-buttons" });
        const labels: Record<string, string> = { yes: "Yes (y)", no: "No (n)", na: "N/A (space)" };
        for (const answer of q.answers) {
          const btn = this.el(
            "button",
            { class: "answer-btn", "data-answer": answer, type: "button" },
            labels[answer] ?? answer,
          );
          if (this.state.busy) btn.setAttribute("disabled", "disabled");
          btn.addEventListener("click", () => void this.submitAnswer(answer));
          row.appendChild(btn);
        }
        banner.appendChild(row);
      } else {
        const row = this.el("div", { class: "answer-buttons" });
        const select = this.el("select", { id: "what-select" });
        for (const answer of q.answers.filter((a) => a !== "na")) {
          select.appendChild(this.el("option", { value: answer }, answer));
        }
        const send = this.el("button", { id: "what-submit", type: "button" }, "Answer");
        send.addEventListener("click", () =>
          void this.submitAnswer((select as HTMLSelectElement).value),
        );
        const na = this.el(
          "button",
          { class: "answer-btn", "data-answer": "na", type: "button" },
          "N/A",
        );
        na.addEventListener("click", () => void this.submitAnswer("na"));
        if (this.state.busy) {
          select.setAttribute("disabled", "disabled");
          send.setAttribute("disabled", "disabled");
          na.setAttribute("disabled", "disabled");
        }
        row.appendChild(select);
        row.appendChild(send);
        row.appendChild(na);
        banner.appendChild(row);
      }
      return banner;
    }
    // finished
    const guess = game.guess;
    if (guess) {
      const won = guess.scene_id === game.target_id;
      banner.appendChild(
        this.el(
          "p",
          { id: "guess-banner", class: won ? "model-won" : "model-lost" },
          `My guess: scene ${guess.scene_id}. ${won ? "I win!" : "You win!"}`,
        ),
      );
      banner.appendChild(
        this.el("p", { class: "stop-reason" }, `stopped: ${guess.stop_reason}`),
      );
      const again = this.el("button", { id: "play-again", type: "button" }, "Play again");
      again.addEventListener("click", () => this.restart());
      banner.appendChild(again);
    }
    return banner;
  }

  private renderGrid(game: GameState): HTMLElement {
    const grid = this.el("div", { class: "grid" });
    grid.style.gridTemplateColumns = `repeat(${gridColumns(game.k)}, 1fr)`;
    game.scenes.forEach((spec, idx) => {
      const cellClasses = ["scene-cell"];
      if (idx === game.target_id) cellClasses.push("target");
      if (game.status === "finished" && game.guess && idx === game.guess.scene_id) {
        cellClasses.push("guessed");
      }
      const cell = this.el("div", {
        class: cellClasses.join(" "),
        "data-scene-id": String(idx),
      });
      const label = this.el("div", { class: "scene-label" }, `Scene ${idx}`);
      if (idx === game.target_id) {
        label.appendChild(this.el("span", { class: "target-badge" }, " your target"));
      }
      cell.appendChild(label);
      cell.appendChild(renderScene(this.doc, spec));
      grid.appendChild(cell);
    });
    return grid;
  }

  private renderDebug(game: GameState): HTMLElement | null {
    const debug = game.debug;
    if (!debug) return null;
    const panel = this.el("div", { class: "debug-panel" });
    panel.appendChild(this.el("h2", {}, "Model internals"));
    panel.appendChild(
      this.el("p", { id: "debug-entropy" }, `${debug.entropy_bits} bits`),
    );
    const bars = this.el("div", { class: "posterior-bars" });
    debug.posterior.forEach((prob, idx) => {
      const bar = this.el("div", {
        class: idx === game.target_id ? "bar bar-target" : "bar",
        title: `scene ${idx}: ${prob}`,
      });
      bar.style.height = `${Math.max(1, Math.round(parseFloat(prob) * 100))}px`;
      bars.appendChild(bar);
    });
    panel.appendChild(bars);
    const list = this.el("ol", { class: "top-questions" });
    for (const item of debug.top_questions) {
      list.appendChild(this.el("li", {}, `${item.text} (${item.eig_bits} bits)`));
    }
    panel.appendChild(list);
    return panel;
  }
}
