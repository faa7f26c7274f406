/** Search state machine: one in-flight search, one active index job. */

import { ApiClient } from "./api.js";
import { ApiError, IndexJobStatus, SearchResponse } from "./types.js";

export interface UiSearchState {
  prompt: string;
  threshold: number; // detector confidence threshold, slider range [0, 1]
  model: string; // extractor id; "" means the server default
  k: number;
  pending: boolean;
  response: SearchResponse | null;
  error: { code: string; message: string } | null;
  indexJob: IndexJobStatus | null;
}

export function initialState(): UiSearchState {
  return {
    prompt: "",
    threshold: 0.1,
    model: "",
    k: 10,
    pending: false,
    response: null,
    error: null,
    indexJob: null,
  };
}

export function clampThreshold(value: number): number {
  if (Number.isNaN(value)) return 0;
  return Math.min(1, Math.max(0, value));
}

export function indexJobActive(state: UiSearchState): boolean {
  return state.indexJob !== null && ["queued", "running"].includes(state.indexJob.state);
}

/** The search button is live only with a prompt, no in-flight search, and no running index job. */
export function canSearch(state: UiSearchState): boolean {
  return state.prompt.trim().length > 0 && !state.pending && !indexJobActive(state);
}

export type Listener = (state: UiSearchState) => void;

export class SearchController {
  readonly state: UiSearchState = initialState();
  private reindexInFlight = false; // set synchronously: guards the double-click race

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: Listener,
    private readonly pollIntervalMs = 250,
  ) {}

  private notify(): void {
    this.onChange(this.state);
  }

  setPrompt(prompt: string): void {
    this.state.prompt = prompt;
    this.notify();
  }

  setThreshold(value: number): void {
    this.state.threshold = clampThreshold(value);
    this.notify();
  }

  setModel(model: string): void {
    this.state.model = model;
    this.notify();
  }

  setK(k: number): void {
    this.state.k = Math.max(1, Math.floor(k) || 1);
    this.notify();
  }

  /** Run a search; a fresh entropy seed is chosen by the server when omitted. */
  async runSearch(seed?: number): Promise<void> {
    if (!canSearch(this.state)) {
      return;
    }
    this.state.pending = true;
    this.state.error = null;
    this.notify();
    try {
      this.state.response = await this.api.search({
        prompt: this.state.prompt,
        threshold: this.state.threshold,
        k: this.state.k,
        model: this.state.model || undefined,
        seed,
      });
    } catch (err) {
      if (err instanceof ApiError) {
        this.state.error = { code: err.code, message: err.message };
      } else {
        this.state.error = { code: "NETWORK", message: String(err) };
      }
    } finally {
      this.state.pending = false;
      this.notify();
    }
  }

  /** Re-roll: identical query, new random draw (server picks a fresh seed). */
  async reroll(): Promise<void> {
    await this.runSearch(undefined);
  }

  /** Start (or join) an index job and poll it to completion. */
  async reindex(force = false): Promise<void> {
    if (this.reindexInFlight || indexJobActive(this.state)) {
      return; // double-click must not start a second job
    }
    this.reindexInFlight = true;
    try {
      const started = await this.api.startIndex(this.state.model || undefined, force);
      this.state.indexJob = started.status;
      this.notify();
      while (["queued", "running"].includes(this.state.indexJob.state)) {
        await sleep(this.pollIntervalMs);
        this.state.indexJob = await this.api.indexStatus(started.job_id);
        this.notify();
      }
    } catch (err) {
      if (err instanceof ApiError) {
        this.state.error = { code: err.code, message: err.message };
      } else {
        this.state.error = { code: "NETWORK", message: String(err) };
      }
      this.state.indexJob = null;
      this.notify();
    } finally {
      this.reindexInFlight = false;
    }
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
