/** DOM rendering: result grid, provenance panel, status banners.
 *
 * Tiles are laid out strictly in response order (the server already ranks),
 * and every displayed score is the API value to four decimal places.
 */

import { IndexJobStatus, Provenance, SearchResponse } from "./types.js";

export interface UiError {
  code: string;
  message: string;
}

export function formatScore(score: number): string {
  return score.toFixed(4);
}

export function renderResults(container: HTMLElement, response: SearchResponse | null): void {
  container.replaceChildren();
  if (!response || response.items.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty";
    empty.textContent = response ? "No results." : "";
    container.appendChild(empty);
    return;
  }
  for (const item of response.items) {
    const tile = document.createElement("figure");
    tile.className = "tile";
    tile.dataset.path = item.path;

    const img = document.createElement("img");
    img.src = item.thumbnail_url;
    img.alt = item.path;
    img.loading = "lazy";

    const caption = document.createElement("figcaption");
    const score = document.createElement("span");
    score.className = "score";
    score.textContent = formatScore(item.score);
    const path = document.createElement("span");
    path.className = "path";
    path.textContent = item.path;
    path.title = item.path;
    caption.append(score, path);

    tile.append(img, caption);
    container.appendChild(tile);
  }
}

export function renderProvenance(
  container: HTMLElement,
  provenance: Provenance | null,
  thumbnailSize = 360,
): void {
  container.replaceChildren();
  if (!provenance) {
    container.hidden = true;
    return;
  }
  container.hidden = false;

  const heading = document.createElement("h2");
  heading.textContent = "Query crop";

  const wrap = document.createElement("div");
  wrap.className = "overlay-wrap";
  const img = document.createElement("img");
  img.src = `/api/image?path=${encodeURIComponent(provenance.source_path)}&size=${thumbnailSize}`;
  img.alt = provenance.source_path;

  const box = document.createElement("div");
  box.className = "bbox";
  const [x0, y0, x1, y1] = provenance.bbox;
  const [width, height] = provenance.source_size;
  if (width > 0 && height > 0) {
    box.style.left = `${(100 * x0) / width}%`;
    box.style.top = `${(100 * y0) / height}%`;
    box.style.width = `${(100 * (x1 - x0)) / width}%`;
    box.style.height = `${(100 * (y1 - y0)) / height}%`;
  }
  wrap.append(img, box);

  const meta = document.createElement("dl");
  meta.className = "provenance-meta";
  const rows: Array<[string, string]> = [
    ["Source", provenance.source_path],
    ["Prompt", provenance.prompt],
    ["Detector score", provenance.detector_score.toFixed(4)],
    ["Seed", String(provenance.seed)],
  ];
  for (const [label, value] of rows) {
    const dt = document.createElement("dt");
    dt.textContent = label;
    const dd = document.createElement("dd");
    dd.textContent = value;
    meta.append(dt, dd);
  }

  container.append(heading, wrap, meta);
}

export const THRESHOLD_HINT =
  "No image matched the prompt above the current threshold — try lowering the threshold slider.";

export function renderError(banner: HTMLElement, error: UiError | null): void {
  banner.replaceChildren();
  if (!error) {
    banner.hidden = true;
    return;
  }
  banner.hidden = false;
  const message = document.createElement("p");
  if (error.code === "PROMPT_NOT_FOUND") {
    banner.className = "banner hint";
    message.textContent = THRESHOLD_HINT;
  } else {
    banner.className = "banner error";
    message.textContent = `${error.code}: ${error.message}`;
  }
  banner.appendChild(message);
}

export function renderJob(element: HTMLElement, job: IndexJobStatus | null): void {
  element.replaceChildren();
  if (!job) {
    element.hidden = true;
    return;
  }
  element.hidden = false;
  const text = document.createElement("span");
  if (job.state === "running" || job.state === "queued") {
    text.textContent = `indexing ${job.done}/${job.total || "?"}`;
    const progress = document.createElement("progress");
    if (job.total > 0) {
      progress.max = job.total;
      progress.value = job.done;
    }
    element.append(text, progress);
  } else if (job.state === "done") {
    text.textContent = job.message || "index up to date";
    element.appendChild(text);
  } else {
    text.textContent = `indexing failed: ${job.message}`;
    element.className = "banner error";
    element.appendChild(text);
  }
}
