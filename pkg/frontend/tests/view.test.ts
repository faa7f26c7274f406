import { describe, expect, it } from "vitest";

import {
  THRESHOLD_HINT,
  formatScore,
  renderError,
  renderJob,
  renderProvenance,
  renderResults,
} from "../src/view.js";
import { jobStatus, mockedResponse } from "./fixtures.js";

describe("formatScore", () => {
  it("always renders four decimals", () => {
    expect(formatScore(1)).toBe("1.0000");
    expect(formatScore(0.87654321)).toBe("0.8765");
    expect(formatScore(0.5)).toBe("0.5000");
    expect(formatScore(-0.125)).toBe("-0.1250");
  });
});

describe("renderResults", () => {
  it("renders tiles in exact response order with 4-decimal scores", () => {
    const container = document.createElement("section");
    const response = mockedResponse(10);
    renderResults(container, response);

    const tiles = [...container.querySelectorAll(".tile")];
    expect(tiles).toHaveLength(10);
    tiles.forEach((tile, i) => {
      expect((tile as HTMLElement).dataset.path).toBe(response.items[i].path);
      expect(tile.querySelector(".score")?.textContent).toBe(
        response.items[i].score.toFixed(4),
      );
      expect(tile.querySelector("img")?.getAttribute("src")).toBe(
        response.items[i].thumbnail_url,
      );
    });
  });

  it("shows an empty note for zero results", () => {
    const container = document.createElement("section");
    renderResults(container, { items: [], provenance: null, timings_ms: {} });
    expect(container.textContent).toContain("No results");
  });
});

describe("renderProvenance", () => {
  it("shows source, prompt, detector score, seed, and a scaled box", () => {
    const panel = document.createElement("aside");
    const provenance = mockedResponse().provenance!;
    renderProvenance(panel, provenance);
    expect(panel.hidden).toBe(false);
    expect(panel.textContent).toContain("photos/3_0.png");
    expect(panel.textContent).toContain("cat");
    expect(panel.textContent).toContain("0.8321");
    expect(panel.textContent).toContain("42");
    const box = panel.querySelector(".bbox") as HTMLElement;
    // bbox (10,20,110,100) over a 256x192 source
    expect(box.style.left).toBe(`${(100 * 10) / 256}%`);
    expect(box.style.top).toBe(`${(100 * 20) / 192}%`);
  });

  it("hides when there is no provenance", () => {
    const panel = document.createElement("aside");
    renderProvenance(panel, null);
    expect(panel.hidden).toBe(true);
  });
});

describe("renderError", () => {
  it("turns PROMPT_NOT_FOUND into the threshold hint", () => {
    const banner = document.createElement("div");
    renderError(banner, { code: "PROMPT_NOT_FOUND", message: "nothing matched" });
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toBe(THRESHOLD_HINT);
    expect(banner.textContent).toContain("threshold");
  });

  it("renders other errors verbatim", () => {
    const banner = document.createElement("div");
    renderError(banner, { code: "STALE_INDEX", message: "catalog changed" });
    expect(banner.textContent).toContain("STALE_INDEX");
    expect(banner.textContent).toContain("catalog changed");
  });

  it("hides without an error", () => {
    const banner = document.createElement("div");
    renderError(banner, null);
    expect(banner.hidden).toBe(true);
  });
});

describe("renderJob", () => {
  it("shows running progress as done/total", () => {
    const element = document.createElement("div");
    renderJob(element, jobStatus({ state: "running", done: 42, total: 152 }));
    expect(element.textContent).toContain("42/152");
    const progress = element.querySelector("progress")!;
    expect(progress.value).toBe(42);
    expect(progress.max).toBe(152);
  });

  it("shows completion message", () => {
    const element = document.createElement("div");
    renderJob(element, jobStatus({ state: "done", message: "built: 36 images indexed" }));
    expect(element.textContent).toContain("36 images indexed");
  });
});
