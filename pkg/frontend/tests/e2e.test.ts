/**
 * End-to-end flows against the stubbed service fixture: the controller is
 * driven exactly as main.ts drives it, and assertions run on both the
 * state and the rendered page.
 */

import { describe, expect, it } from "vitest";

import { DetectionClient, ServiceError } from "../src/api.js";
import { App } from "../src/controller.js";
import { EXAMPLE_PREDICTION, EXAMPLE_ROW, EXAMPLE_SCHEMA } from "../src/example.js";
import { renderApp } from "../src/render.js";
import { canSubmit } from "../src/state.js";
import { stubService } from "./stub.js";

const URL_BASE = "http://127.0.0.1:8000";

async function bootedApp(stub = stubService()): Promise<App> {
  const app = new App(URL_BASE, undefined, stub.fetch);
  await app.loadSchema();
  return app;
}

describe("example round trip", () => {
  it("loads the schema and builds one field per feature", async () => {
    const app = await bootedApp();
    expect(app.state.schema).toEqual(EXAMPLE_SCHEMA);
    expect(Object.keys(app.state.fields)).toEqual(EXAMPLE_SCHEMA.features);
    expect(canSubmit(app.state)).toBe(false);
  });

  it("load example fills every field and enables detect", async () => {
    const app = await bootedApp();
    app.loadExample();
    for (const name of EXAMPLE_SCHEMA.features) {
      expect(app.state.fields[name].raw).not.toBe("");
      expect(app.state.fields[name].error).toBeNull();
    }
    expect(canSubmit(app.state)).toBe(true);
  });

  it("submits the example row untransformed and renders the verdict", async () => {
    const stub = stubService();
    const app = await bootedApp(stub);
    app.loadExample();
    await app.detect();

    // The service saw the exact numbers that ship with the UI.
    expect(stub.lastFeatures).toEqual(EXAMPLE_ROW);
    expect(app.state.result).toEqual(EXAMPLE_PREDICTION);
    expect(app.state.history).toEqual([
      { label: EXAMPLE_PREDICTION.label, score: EXAMPLE_PREDICTION.score },
    ]);

    const html = renderApp(app.state);
    expect(html).toContain(`class="result positive"`);
    expect(html).toContain(EXAMPLE_PREDICTION.label);
    expect(html).toContain(`pipeline ${EXAMPLE_PREDICTION.pipeline}`);
  });

  it("clearing the form disables detect again", async () => {
    const app = await bootedApp();
    app.loadExample();
    app.clear();
    expect(canSubmit(app.state)).toBe(false);
    await app.detect();
    expect(app.state.result).toBeNull();
  });

  it("keeps detect disabled while text does not parse", async () => {
    const stub = stubService();
    const app = await bootedApp(stub);
    app.loadExample();
    app.input(EXAMPLE_SCHEMA.features[0], "abc");
    expect(canSubmit(app.state)).toBe(false);
    await app.detect();
    expect(stub.counts.predict).toBe(0);
  });
});

describe("service rejection", () => {
  it("surfaces a field-level error for each name the service flagged", async () => {
    const flagged = EXAMPLE_SCHEMA.features[2];
    const stub = stubService({
      rejectWith: { error: "row does not match the bundle schema", missing: [flagged] },
    });
    const app = await bootedApp(stub);
    app.loadExample();
    await app.detect();

    expect(app.state.fields[flagged].error).toBe("rejected by the service");
    expect(app.state.resultError).toBe("row does not match the bundle schema");
    const html = renderApp(app.state);
    expect(html).toContain(`id="err-${flagged}"`);
    expect(html).toContain("row does not match the bundle schema");
  });
});

describe("transport failure", () => {
  it("shows a retry banner, keeps the inputs, and recovers on retry", async () => {
    const stub = stubService({ predictNetworkFailures: 1 });
    const app = await bootedApp(stub);
    app.loadExample();
    await app.detect();

    expect(app.state.banner.kind).toBe("network-error");
    const name = EXAMPLE_SCHEMA.features[0];
    expect(app.state.fields[name].raw).toBe(String(EXAMPLE_ROW[name]));
    expect(renderApp(app.state)).toContain(`data-action="retry-submit"`);

    await app.detect();
    expect(app.state.banner.kind).toBe("none");
    expect(app.state.result).toEqual(EXAMPLE_PREDICTION);
  });

  it("offers a schema retry when the first fetch never lands", async () => {
    const stub = stubService({ schemaFailures: 1 });
    const app = new App(URL_BASE, undefined, stub.fetch);
    await app.loadSchema();
    expect(app.state.banner.kind).toBe("schema-error");
    expect(renderApp(app.state)).toContain(`data-action="retry-schema"`);

    await app.loadSchema();
    expect(app.state.schema).toEqual(EXAMPLE_SCHEMA);
  });
});

describe("in-flight guard", () => {
  it("drops a second submit while the first is pending", async () => {
    const stub = stubService({ hold: true });
    const app = await bootedApp(stub);
    app.loadExample();

    const first = app.detect();
    expect(app.state.submitting).toBe(true);
    expect(renderApp(app.state)).toContain("Detecting…");
    const second = app.detect();
    stub.release();
    await Promise.all([first, second]);

    expect(stub.counts.predict).toBe(1);
    expect(app.state.history).toHaveLength(1);
  });
});

describe("DetectionClient", () => {
  it("raises ServiceError with the parsed missing list", async () => {
    const stub = stubService();
    const client = new DetectionClient(URL_BASE, stub.fetch);
    const partial = { [EXAMPLE_SCHEMA.features[0]]: 1.0 };
    const error = await client.predict(partial).catch((exc: unknown) => exc);
    expect(error).toBeInstanceOf(ServiceError);
    expect((error as ServiceError).status).toBe(400);
    expect((error as ServiceError).missing).toEqual(EXAMPLE_SCHEMA.features.slice(1));
  });

  it("falls back to a status message when the body is not JSON", async () => {
    const client = new DetectionClient(URL_BASE, async () => new Response("boom", { status: 500 }));
    const error = await client.health().catch((exc: unknown) => exc);
    expect(error).toBeInstanceOf(ServiceError);
    expect((error as ServiceError).message).toBe("service returned 500");
  });

  it("answers health checks from the stub", async () => {
    const stub = stubService();
    const client = new DetectionClient(URL_BASE + "/", stub.fetch);
    expect(await client.health()).toEqual({ status: "ok", bundle_loaded: true, version: "0.1.0" });
  });
});
