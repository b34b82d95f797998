/**
 * HTML rendering.
 *
 * Every function here maps FormState to a markup string and nothing else,
 * so the whole page can be asserted with snapshot tests.  main.ts decides
 * when to inject the result into the document.
 */

import type { FormState } from "./types.js";
import { canSubmit } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

// ---------------------------------------------------------------------------
// Pieces
// ---------------------------------------------------------------------------

export function renderBanner(state: FormState): string {
  const banner = state.banner;
  if (banner.kind === "none") {
    return "";
  }
  const action = banner.kind === "schema-error" ? "retry-schema" : "retry-submit";
  return (
    `<div class="banner" role="alert">` +
    `<span>${escapeHtml(banner.message)}</span>` +
    `<button type="button" data-action="${action}">Retry</button>` +
    `</div>`
  );
}

export function renderForm(state: FormState): string {
  if (state.schema === null) {
    return `<p class="loading">Loading feature schema…</p>`;
  }
  const rows = state.schema.features
    .map((name) => {
      const field = state.fields[name];
      const safe = escapeHtml(name);
      const invalid = field.error !== null;
      const message = invalid
        ? `<span class="field-error" id="err-${safe}">${escapeHtml(field.error as string)}</span>`
        : "";
      return (
        `<div class="field${invalid ? " invalid" : ""}">` +
        `<label for="f-${safe}">${safe}</label>` +
        `<input id="f-${safe}" data-field="${safe}" type="text" inputmode="decimal"` +
        ` value="${escapeHtml(field.raw)}"${invalid ? ` aria-invalid="true" aria-describedby="err-${safe}"` : ""}>` +
        message +
        `</div>`
      );
    })
    .join("\n");
  const disabled = canSubmit(state) ? "" : " disabled";
  return (
    `<form data-action="detect">\n${rows}\n` +
    `<div class="actions">` +
    `<button type="submit" class="detect"${disabled}>${state.submitting ? "Detecting…" : "Detect"}</button>` +
    `<button type="button" data-action="load-example">Load example</button>` +
    `<button type="button" data-action="clear">Clear</button>` +
    `</div>\n</form>`
  );
}

export function renderResult(state: FormState): string {
  if (state.resultError !== null) {
    return `<div class="result error"><p>${escapeHtml(state.resultError)}</p></div>`;
  }
  if (state.result === null) {
    return "";
  }
  const { label, score, pipeline } = state.result;
  const positive = state.schema !== null && label === state.schema.positive_label;
  return (
    `<div class="result${positive ? " positive" : ""}">` +
    `<p class="verdict">${escapeHtml(label)} <span class="score">(${score})</span></p>` +
    `<p class="pipeline">pipeline ${escapeHtml(pipeline)}</p>` +
    `</div>`
  );
}

export function renderHistory(state: FormState): string {
  if (state.history.length === 0) {
    return "";
  }
  const items = state.history
    .map((entry) => `<li>${escapeHtml(entry.label)} (${entry.score})</li>`)
    .join("");
  return `<section class="history"><h2>This session</h2><ol>${items}</ol></section>`;
}

export function renderSettings(state: FormState): string {
  return (
    `<details class="settings"><summary>Settings</summary>` +
    `<label for="service-url">Service URL</label>` +
    `<input id="service-url" data-setting="service-url" type="text"` +
    ` value="${escapeHtml(state.serviceUrl)}">` +
    `</details>`
  );
}

// ---------------------------------------------------------------------------
// Page
// ---------------------------------------------------------------------------

export function renderApp(state: FormState): string {
  return [
    `<h1>Rockfall detection</h1>`,
    renderBanner(state),
    renderForm(state),
    renderResult(state),
    renderHistory(state),
    renderSettings(state),
  ]
    .filter((part) => part !== "")
    .join("\n");
}
