/**
 * Pure transitions over FormState.
 *
 * Every user action and service outcome maps to one function here that
 * returns a new state; nothing in this module touches the DOM or the
 * network.  main.ts owns the single mutable reference.
 */

import type {
  Banner,
  FieldState,
  FormState,
  PredictResponse,
  SchemaResponse,
  ServiceErrorBody,
} from "./types.js";

const NOT_A_NUMBER = "enter a finite number";
const REJECTED = "rejected by the service";

export function initialState(serviceUrl: string): FormState {
  return {
    schema: null,
    fields: {},
    submitting: false,
    result: null,
    resultError: null,
    banner: { kind: "none" },
    history: [],
    serviceUrl,
  };
}

// ---------------------------------------------------------------------------
// Schema lifecycle
// ---------------------------------------------------------------------------

export function schemaLoaded(state: FormState, schema: SchemaResponse): FormState {
  const fields: Record<string, FieldState> = {};
  for (const name of schema.features) {
    fields[name] = { raw: "", error: null };
  }
  return { ...state, schema, fields, banner: { kind: "none" } };
}

export function schemaFailed(state: FormState, message: string): FormState {
  const banner: Banner = { kind: "schema-error", message };
  return { ...state, banner };
}

// ---------------------------------------------------------------------------
// Field input
// ---------------------------------------------------------------------------

/** Parse one input; null means the text is not a finite number. */
export function parseFeature(raw: string): number | null {
  const text = raw.trim();
  if (text === "") {
    return null;
  }
  const value = Number(text);
  return Number.isFinite(value) ? value : null;
}

export function setField(state: FormState, name: string, raw: string): FormState {
  if (!(name in state.fields)) {
    return state;
  }
  // A blank field blocks submission but is not shouted at; only text that
  // fails to parse gets an inline message.
  const error = raw.trim() === "" || parseFeature(raw) !== null ? null : NOT_A_NUMBER;
  return {
    ...state,
    fields: { ...state.fields, [name]: { raw, error } },
  };
}

export function fillFields(state: FormState, values: Record<string, number>): FormState {
  const fields: Record<string, FieldState> = { ...state.fields };
  for (const name of Object.keys(fields)) {
    if (name in values) {
      fields[name] = { raw: String(values[name]), error: null };
    }
  }
  return { ...state, fields };
}

export function clearForm(state: FormState): FormState {
  const fields: Record<string, FieldState> = {};
  for (const name of Object.keys(state.fields)) {
    fields[name] = { raw: "", error: null };
  }
  return { ...state, fields, resultError: null };
}

// ---------------------------------------------------------------------------
// Submission
// ---------------------------------------------------------------------------

/** The detect button stays disabled until every field parses. */
export function canSubmit(state: FormState): boolean {
  if (state.schema === null || state.submitting) {
    return false;
  }
  const names = state.schema.features;
  return names.length > 0 && names.every((name) => parseFeature(state.fields[name].raw) !== null);
}

/** Collect the parsed row; only valid states should reach this. */
export function featureValues(state: FormState): Record<string, number> {
  const values: Record<string, number> = {};
  for (const name of state.schema ? state.schema.features : []) {
    const value = parseFeature(state.fields[name].raw);
    if (value !== null) {
      values[name] = value;
    }
  }
  return values;
}

export function beginSubmit(state: FormState): FormState {
  return { ...state, submitting: true, banner: { kind: "none" } };
}

export function submitSucceeded(state: FormState, result: PredictResponse): FormState {
  return {
    ...state,
    submitting: false,
    result,
    resultError: null,
    history: [...state.history, { label: result.label, score: result.score }],
  };
}

/** The service answered 4xx/5xx; map `missing` onto field-level messages. */
export function submitRejected(state: FormState, body: ServiceErrorBody): FormState {
  const fields: Record<string, FieldState> = { ...state.fields };
  for (const name of body.missing) {
    if (name in fields) {
      fields[name] = { ...fields[name], error: REJECTED };
    }
  }
  return { ...state, submitting: false, fields, result: null, resultError: body.error };
}

/** The request never completed; keep the inputs and offer a retry. */
export function submitFailed(state: FormState, message: string): FormState {
  const banner: Banner = { kind: "network-error", message };
  return { ...state, submitting: false, banner };
}

// ---------------------------------------------------------------------------
// Settings
// ---------------------------------------------------------------------------

export function setServiceUrl(state: FormState, serviceUrl: string): FormState {
  return { ...state, serviceUrl };
}
