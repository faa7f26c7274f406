/** Thin fetch client for the local search service. */

import {
  ApiError,
  IndexJobStatus,
  ModelsResponse,
  SearchRequest,
  SearchResponse,
  StartIndexResponse,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let code = "HTTP_ERROR";
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body?.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(code, message, response.status);
}

export class ApiClient {
  constructor(private readonly fetchFn: FetchLike = (...args) => fetch(...args)) {}

  async search(request: SearchRequest): Promise<SearchResponse> {
    const response = await this.fetchFn("/api/search", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
    return parseOrThrow<SearchResponse>(response);
  }

  async models(): Promise<ModelsResponse> {
    return parseOrThrow<ModelsResponse>(await this.fetchFn("/api/models"));
  }

  async startIndex(model?: string, force = false): Promise<StartIndexResponse> {
    const response = await this.fetchFn("/api/index", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ model, force }),
    });
    return parseOrThrow<StartIndexResponse>(response);
  }

  async indexStatus(jobId: string): Promise<IndexJobStatus> {
    const response = await this.fetchFn(
      `/api/index/status?job_id=${encodeURIComponent(jobId)}`,
    );
    return parseOrThrow<IndexJobStatus>(response);
  }
}
