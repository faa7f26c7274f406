/** Wire types mirroring the service's JSON API. */

export interface SearchItem {
  path: string;
  score: number;
  thumbnail_url: string;
}

export interface Provenance {
  source_path: string;
  bbox: [number, number, number, number];
  detector_score: number;
  prompt: string;
  seed: number;
  source_size: [number, number];
}

export interface SearchResponse {
  items: SearchItem[];
  provenance: Provenance | null;
  timings_ms: Record<string, number>;
}

export interface SearchRequest {
  prompt: string;
  threshold?: number;
  k?: number;
  model?: string;
  seed?: number;
}

export interface ModelInfo {
  model_id: string;
  role: "extractor" | "detector";
  feature_dim: number | null;
  revision: string;
  size_bytes: number;
}

export interface ModelsResponse {
  models: ModelInfo[];
  default_model: string;
  default_detector: string;
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface IndexJobStatus {
  job_id: string;
  root: string;
  model: string;
  state: JobState;
  done: number;
  total: number;
  action: string;
  message: string;
}

export interface StartIndexResponse {
  job_id: string;
  created: boolean;
  status: IndexJobStatus;
}

/** Structured error from the service; `code` is machine-readable. */
export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}
