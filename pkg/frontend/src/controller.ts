/**
 * Action layer between the DOM and the pure state transitions.
 *
 * Holds the single FormState reference, talks to the service through a
 * DetectionClient, and reports every new state through a callback.  Tests
 * drive this class directly with a stubbed fetch; main.ts connects it to
 * the document.
 */

import { DetectionClient, ServiceError } from "./api.js";
import type { FetchLike } from "./api.js";
import { EXAMPLE_ROW } from "./example.js";
import {
  beginSubmit,
  canSubmit,
  clearForm,
  featureValues,
  fillFields,
  initialState,
  schemaFailed,
  schemaLoaded,
  setField,
  setServiceUrl,
  submitFailed,
  submitRejected,
  submitSucceeded,
} from "./state.js";
import type { FormState } from "./types.js";

const UNREACHABLE = "could not reach the detection service";

export class App {
  state: FormState;
  private client: DetectionClient;
  private readonly fetchImpl: FetchLike | undefined;
  private readonly onChange: (state: FormState) => void;

  constructor(serviceUrl: string, onChange?: (state: FormState) => void, fetchImpl?: FetchLike) {
    this.state = initialState(serviceUrl);
    this.fetchImpl = fetchImpl;
    this.client = new DetectionClient(serviceUrl, fetchImpl);
    this.onChange = onChange ?? (() => {});
  }

  private apply(next: FormState): void {
    this.state = next;
    this.onChange(next);
  }

  async loadSchema(): Promise<void> {
    try {
      const schema = await this.client.schema();
      this.apply(schemaLoaded(this.state, schema));
    } catch {
      this.apply(schemaFailed(this.state, UNREACHABLE));
    }
  }

  input(name: string, raw: string): void {
    this.apply(setField(this.state, name, raw));
  }

  loadExample(): void {
    this.apply(fillFields(this.state, EXAMPLE_ROW));
  }

  clear(): void {
    this.apply(clearForm(this.state));
  }

  setServiceUrl(url: string): void {
    this.client = new DetectionClient(url, this.fetchImpl);
    this.apply(setServiceUrl(this.state, url));
  }

  /** Submit the form; a second call while one is in flight is a no-op. */
  async detect(): Promise<void> {
    if (!canSubmit(this.state)) {
      return;
    }
    const features = featureValues(this.state);
    this.apply(beginSubmit(this.state));
    try {
      const result = await this.client.predict(features);
      this.apply(submitSucceeded(this.state, result));
    } catch (exc) {
      if (exc instanceof ServiceError) {
        this.apply(submitRejected(this.state, { error: exc.message, missing: exc.missing }));
      } else {
        this.apply(submitFailed(this.state, UNREACHABLE));
      }
    }
  }
}
