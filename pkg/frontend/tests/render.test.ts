/** Rendering is a pure function of FormState, so these are string asserts. */

import { describe, expect, it } from "vitest";

import {
  renderApp,
  renderBanner,
  renderForm,
  renderHistory,
  renderResult,
} from "../src/render.js";
import {
  fillFields,
  initialState,
  schemaFailed,
  schemaLoaded,
  setField,
  submitFailed,
  submitRejected,
  submitSucceeded,
} from "../src/state.js";
import type { FormState, SchemaResponse } from "../src/types.js";

const WIDE_SCHEMA: SchemaResponse = {
  features: Array.from({ length: 35 }, (_, i) => `feature_${String(i + 1).padStart(2, "0")}`),
  positive_label: "Candidate",
  pipeline: "GNB-SMOTE/35",
};

function wide(): FormState {
  return schemaLoaded(initialState("http://127.0.0.1:8000"), WIDE_SCHEMA);
}

function wideFilled(): FormState {
  const values: Record<string, number> = {};
  WIDE_SCHEMA.features.forEach((name, i) => {
    values[name] = i + 0.5;
  });
  return fillFields(wide(), values);
}

describe("renderForm", () => {
  it("matches the snapshot for a 35-name schema", () => {
    expect(renderApp(wide())).toMatchSnapshot();
  });

  it("renders one labeled input per feature, in schema order", () => {
    const html = renderForm(wide());
    const names = [...html.matchAll(/data-field="([^"]+)"/g)].map((m) => m[1]);
    expect(names).toEqual(WIDE_SCHEMA.features);
    for (const name of WIDE_SCHEMA.features) {
      expect(html).toContain(`<label for="f-${name}">${name}</label>`);
    }
  });

  it("shows a loading line before the schema arrives", () => {
    expect(renderForm(initialState("http://x"))).toContain("Loading feature schema");
  });

  it("disables the detect button until every field is filled", () => {
    expect(renderForm(wide())).toContain(`class="detect" disabled`);
    expect(renderForm(wideFilled())).toContain(`class="detect">Detect`);
  });

  it("marks a non-numeric field inline and disables the button", () => {
    const html = renderForm(setField(wideFilled(), "feature_07", "abc"));
    expect(html).toContain(`class="field invalid"`);
    expect(html).toContain(`<span class="field-error" id="err-feature_07">enter a finite number</span>`);
    expect(html).toContain(`aria-invalid="true"`);
    expect(html).toContain(`class="detect" disabled`);
  });

  it("escapes hostile feature names", () => {
    const schema: SchemaResponse = {
      features: [`<img src=x>`],
      positive_label: "Candidate",
      pipeline: "p",
    };
    const html = renderForm(schemaLoaded(initialState("http://x"), schema));
    expect(html).not.toContain("<img");
    expect(html).toContain("&lt;img src=x&gt;");
  });
});

describe("renderResult", () => {
  it("highlights the positive label with score and pipeline id", () => {
    const state = submitSucceeded(wideFilled(), {
      label: "Candidate",
      score: 0.97,
      pipeline: "GNB-SMOTE/35",
    });
    const html = renderResult(state);
    expect(html).toContain(`class="result positive"`);
    expect(html).toContain("Candidate");
    expect(html).toContain("(0.97)");
    expect(html).toContain("pipeline GNB-SMOTE/35");
  });

  it("does not highlight the negative label", () => {
    const state = submitSucceeded(wideFilled(), {
      label: "Not candidate",
      score: 0.02,
      pipeline: "GNB-SMOTE/35",
    });
    expect(renderResult(state)).toContain(`class="result"`);
  });

  it("renders a rejection message instead of a verdict", () => {
    const state = submitRejected(wideFilled(), { error: "row rejected", missing: [] });
    expect(renderResult(state)).toContain(`class="result error"`);
    expect(renderResult(state)).toContain("row rejected");
  });

  it("renders nothing before the first submit", () => {
    expect(renderResult(wideFilled())).toBe("");
  });
});

describe("renderBanner", () => {
  it("offers a schema retry after a failed schema fetch", () => {
    const html = renderBanner(schemaFailed(initialState("http://x"), "no route"));
    expect(html).toContain("no route");
    expect(html).toContain(`data-action="retry-schema"`);
  });

  it("offers a submit retry after a network failure", () => {
    const html = renderBanner(submitFailed(wideFilled(), "request failed"));
    expect(html).toContain(`data-action="retry-submit"`);
  });
});

describe("renderHistory", () => {
  it("lists earlier results oldest first", () => {
    let state = submitSucceeded(wideFilled(), { label: "Candidate", score: 1.0, pipeline: "p" });
    state = submitSucceeded(state, { label: "Not candidate", score: 0.2, pipeline: "p" });
    const html = renderHistory(state);
    expect(html).toContain("<li>Candidate (1)</li><li>Not candidate (0.2)</li>");
  });

  it("is absent while the session has no results", () => {
    expect(renderHistory(wideFilled())).toBe("");
  });
});
