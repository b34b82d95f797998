/**
 * Shared types for the detection form.
 *
 * The wire shapes mirror the prediction service exactly; the UI never
 * renames or rescales anything it receives.
 */

// ---------------------------------------------------------------------------
// Service wire shapes
// ---------------------------------------------------------------------------

export interface HealthResponse {
  status: string;
  bundle_loaded: boolean;
  version: string;
}

export interface SchemaResponse {
  /** Feature names in the order the model was trained on. */
  features: string[];
  /** Label the service reports for a detection, e.g. "Candidate". */
  positive_label: string;
  /** Identifier of the pipeline behind the bundle, e.g. "GNB-SMOTE/3". */
  pipeline: string;
}

export interface PredictResponse {
  label: string;
  score: number;
  pipeline: string;
}

/** Body the service sends with 4xx/5xx responses. */
export interface ServiceErrorBody {
  error: string;
  /** Feature names the service rejected (absent, unknown, or non-finite). */
  missing: string[];
}

// ---------------------------------------------------------------------------
// Form state
// ---------------------------------------------------------------------------

export interface FieldState {
  /** Raw text as typed; submission parses it, the UI never rewrites it. */
  raw: string;
  /** Inline message when the value does not parse or the service flagged it. */
  error: string | null;
}

export interface HistoryEntry {
  label: string;
  score: number;
}

export type Banner =
  | { kind: "none" }
  | { kind: "schema-error"; message: string }
  | { kind: "network-error"; message: string };

/**
 * Everything the page shows, in one plain object.  Rendering is a pure
 * function of this state, so every transition below is snapshot-testable.
 */
export interface FormState {
  schema: SchemaResponse | null;
  /** One entry per schema feature, keyed by feature name. */
  fields: Record<string, FieldState>;
  /** True while a predict request is in flight; blocks a second submit. */
  submitting: boolean;
  result: PredictResponse | null;
  /** Message shown in the result panel when the last submit was rejected. */
  resultError: string | null;
  banner: Banner;
  /** Results of earlier submits this session, oldest first. */
  history: HistoryEntry[];
  serviceUrl: string;
}
