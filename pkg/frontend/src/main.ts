/**
 * Browser entry point: owns the root element, re-renders on every state
 * change, and forwards DOM events to the controller.
 *
 * Keystrokes are the one place the page is patched in place instead of
 * rebuilt, so the focused input never loses its caret; the patch mirrors
 * exactly what renderApp would produce for the same state.
 */

import { App } from "./controller.js";
import { renderApp } from "./render.js";
import { canSubmit } from "./state.js";
import type { FormState } from "./types.js";

declare global {
  interface Window {
    /** Set in index.html to point the UI at a deployed service. */
    IMBAPIPE_SERVICE_URL?: string;
  }
}

const DEFAULT_SERVICE_URL = "http://127.0.0.1:8000";

let root: HTMLElement;
let app: App;
let typing = false;

function render(state: FormState): void {
  if (typing) {
    syncAfterInput(state);
    return;
  }
  root.innerHTML = renderApp(state);
}

/** Bring error spans and the detect button in line with the state. */
function syncAfterInput(state: FormState): void {
  for (const input of root.querySelectorAll<HTMLInputElement>("input[data-field]")) {
    const name = input.dataset.field as string;
    const field = state.fields[name];
    const row = input.closest(".field");
    if (field === undefined || !(row instanceof HTMLElement)) {
      continue;
    }
    const invalid = field.error !== null;
    row.classList.toggle("invalid", invalid);
    let span = row.querySelector(".field-error");
    if (invalid) {
      if (span === null) {
        span = document.createElement("span");
        span.className = "field-error";
        span.id = "err-" + name;
        row.appendChild(span);
      }
      span.textContent = field.error;
      input.setAttribute("aria-invalid", "true");
      input.setAttribute("aria-describedby", span.id);
    } else {
      span?.remove();
      input.removeAttribute("aria-invalid");
      input.removeAttribute("aria-describedby");
    }
  }
  const detect = root.querySelector<HTMLButtonElement>("button.detect");
  if (detect !== null) {
    detect.disabled = !canSubmit(state);
  }
}

function wire(): void {
  root.addEventListener("input", (event) => {
    const target = event.target;
    if (!(target instanceof HTMLInputElement)) {
      return;
    }
    typing = true;
    try {
      if (target.dataset.field !== undefined) {
        app.input(target.dataset.field, target.value);
      } else if (target.dataset.setting === "service-url") {
        app.setServiceUrl(target.value);
      }
    } finally {
      typing = false;
    }
  });

  root.addEventListener("click", (event) => {
    const target = event.target instanceof Element ? event.target.closest("[data-action]") : null;
    if (!(target instanceof HTMLElement) || target.tagName !== "BUTTON") {
      return;
    }
    switch (target.dataset.action) {
      case "load-example":
        app.loadExample();
        break;
      case "clear":
        app.clear();
        break;
      case "retry-schema":
        void app.loadSchema();
        break;
      case "retry-submit":
        void app.detect();
        break;
    }
  });

  root.addEventListener("submit", (event) => {
    event.preventDefault();
    void app.detect();
  });
}

function boot(): void {
  const element = document.getElementById("app");
  if (element === null) {
    throw new Error("missing #app element");
  }
  root = element;
  app = new App(window.IMBAPIPE_SERVICE_URL ?? DEFAULT_SERVICE_URL, render);
  render(app.state);
  wire();
  void app.loadSchema();
}

boot();
