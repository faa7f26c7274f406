/** Shared mocks: canned responses and a scriptable fetch. */

import { IndexJobStatus, SearchResponse } from "../src/types.js";
import { FetchLike } from "../src/api.js";

export function mockedResponse(count = 10): SearchResponse {
  // deliberately non-monotonic path names so any client-side re-sorting
  // by name would be caught; scores descend with ragged decimals
  const scores = [
    0.99995, 0.9876, 0.87654321, 0.8, 0.75, 0.70001, 0.5, 0.44449, 0.3, 0.1234,
  ];
  return {
    items: Array.from({ length: count }, (_, i) => ({
      path: `photos/${(7 * i + 3) % 10}_${i}.png`,
      score: scores[i % scores.length],
      thumbnail_url: `/api/image?path=photos%2F${i}.png&size=256`,
    })),
    provenance: {
      source_path: "photos/3_0.png",
      bbox: [10, 20, 110, 100],
      detector_score: 0.8321,
      prompt: "cat",
      seed: 42,
      source_size: [256, 192],
    },
    timings_ms: { detect_ms: 12.5, extract_ms: 4.2, rank_ms: 0.3 },
  };
}

export function jobStatus(partial: Partial<IndexJobStatus> = {}): IndexJobStatus {
  return {
    job_id: "job1",
    root: "/pictures",
    model: "quadrant-mean",
    state: "running",
    done: 42,
    total: 152,
    action: "",
    message: "",
    ...partial,
  };
}

export interface Route {
  match: (url: string, init?: RequestInit) => boolean;
  respond: (url: string, init?: RequestInit) => { status?: number; body: unknown };
}

/** A fetch stub driven by route table entries, recording every call. */
export function scriptedFetch(routes: Route[]): { fetchFn: FetchLike; calls: string[] } {
  const calls: string[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    calls.push(`${init?.method ?? "GET"} ${url}`);
    for (const route of routes) {
      if (route.match(url, init)) {
        const { status = 200, body } = route.respond(url, init);
        return new Response(JSON.stringify(body), {
          status,
          headers: { "Content-Type": "application/json" },
        });
      }
    }
    return new Response(JSON.stringify({ error: { code: "NOT_FOUND", message: url } }), {
      status: 404,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { fetchFn, calls };
}

export const modelsRoute: Route = {
  match: (url) => url.startsWith("/api/models"),
  respond: () => ({
    body: {
      models: [
        { model_id: "quadrant-mean", role: "extractor", feature_dim: 12, revision: "ab", size_bytes: 30 },
        { model_id: "scripted-detector", role: "detector", feature_dim: null, revision: "cd", size_bytes: 40 },
      ],
      default_model: "quadrant-mean",
      default_detector: "scripted-detector",
    },
  }),
};
