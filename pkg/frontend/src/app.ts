/** Wires controls, controller, and renderers inside a root element. */

import { ApiClient } from "./api.js";
import { SearchController, UiSearchState, canSearch, indexJobActive } from "./state.js";
import { renderError, renderJob, renderProvenance, renderResults } from "./view.js";

export interface AppHandles {
  controller: SearchController;
  prompt: HTMLInputElement;
  threshold: HTMLInputElement;
  thresholdValue: HTMLElement;
  model: HTMLSelectElement;
  k: HTMLInputElement;
  searchButton: HTMLButtonElement;
  rerollButton: HTMLButtonElement;
  reindexButton: HTMLButtonElement;
  banner: HTMLElement;
  job: HTMLElement;
  results: HTMLElement;
  provenance: HTMLElement;
}

function el<T extends HTMLElement>(tag: string, className?: string, text?: string): T {
  const node = document.createElement(tag) as T;
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function createApp(root: HTMLElement, api: ApiClient): AppHandles {
  root.replaceChildren();

  const header = el<HTMLElement>("header");
  header.append(el("h1", "", "pixseek"), el("p", "tagline", "search your pictures with words"));

  const form = el<HTMLFormElement>("form", "controls");
  form.addEventListener("submit", (event) => event.preventDefault());

  const prompt = el<HTMLInputElement>("input", "prompt");
  prompt.type = "text";
  prompt.placeholder = "what are you looking for? e.g. cat";
  prompt.setAttribute("aria-label", "search prompt");

  const searchButton = el<HTMLButtonElement>("button", "", "Search");
  searchButton.type = "submit";
  const rerollButton = el<HTMLButtonElement>("button", "", "Re-roll");
  rerollButton.type = "button";
  rerollButton.title = "Same search, new random query image";
  const reindexButton = el<HTMLButtonElement>("button", "", "Reindex");
  reindexButton.type = "button";

  const threshold = el<HTMLInputElement>("input");
  threshold.type = "range";
  threshold.min = "0";
  threshold.max = "1";
  threshold.step = "0.01";
  threshold.value = "0.1";
  const thresholdValue = el<HTMLElement>("span", "threshold-value", "0.10");
  const thresholdLabel = el<HTMLLabelElement>("label", "threshold");
  thresholdLabel.append("threshold ", threshold, thresholdValue);

  const model = el<HTMLSelectElement>("select");
  model.setAttribute("aria-label", "extractor model");
  const modelLabel = el<HTMLLabelElement>("label", "model");
  modelLabel.append("model ", model);

  const k = el<HTMLInputElement>("input");
  k.type = "number";
  k.min = "1";
  k.value = "10";
  const kLabel = el<HTMLLabelElement>("label", "k");
  kLabel.append("results ", k);

  form.append(prompt, searchButton, rerollButton, reindexButton, thresholdLabel, modelLabel, kLabel);

  const banner = el<HTMLElement>("div", "banner");
  banner.hidden = true;
  const job = el<HTMLElement>("div", "job");
  job.hidden = true;
  const results = el<HTMLElement>("section", "results");
  const provenance = el<HTMLElement>("aside", "provenance");
  provenance.hidden = true;

  const main = el<HTMLElement>("main");
  main.append(results, provenance);
  root.append(header, form, banner, job, main);

  const update = (state: UiSearchState): void => {
    const busy = state.pending || indexJobActive(state);
    searchButton.disabled = !canSearch(state);
    rerollButton.disabled = !canSearch(state) || state.response === null;
    reindexButton.disabled = busy;
    thresholdValue.textContent = state.threshold.toFixed(2);
    renderError(banner, state.error);
    renderJob(job, state.indexJob);
    renderResults(results, state.response);
    renderProvenance(provenance, state.response?.provenance ?? null);
  };

  const controller = new SearchController(api, update);

  prompt.addEventListener("input", () => controller.setPrompt(prompt.value));
  threshold.addEventListener("input", () => controller.setThreshold(Number(threshold.value)));
  model.addEventListener("change", () => controller.setModel(model.value));
  k.addEventListener("change", () => controller.setK(Number(k.value)));
  form.addEventListener("submit", () => void controller.runSearch());
  rerollButton.addEventListener("click", () => void controller.reroll());
  reindexButton.addEventListener("click", () => void controller.reindex());

  update(controller.state);

  void api
    .models()
    .then((payload) => {
      for (const info of payload.models) {
        if (info.role !== "extractor") continue;
        const option = document.createElement("option");
        option.value = info.model_id;
        option.textContent = info.model_id;
        option.selected = info.model_id === payload.default_model;
        model.appendChild(option);
      }
      if (model.value) controller.setModel(model.value);
    })
    .catch(() => {
      // model list is a nicety; search still works with the server default
    });

  return {
    controller, prompt, threshold, thresholdValue, model, k,
    searchButton, rerollButton, reindexButton, banner, job, results, provenance,
  };
}
