/**
 * Thin typed client for the prediction service.
 *
 * The fetch implementation is injectable so tests can stub the service
 * without a network.  Only three endpoints exist: GET /health,
 * GET /api/schema, and POST /api/predict.
 */

import type {
  HealthResponse,
  PredictResponse,
  SchemaResponse,
  ServiceErrorBody,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** A response the service produced on purpose, with its JSON body. */
export class ServiceError extends Error {
  readonly status: number;
  readonly missing: string[];

  constructor(status: number, body: ServiceErrorBody) {
    super(body.error);
    this.name = "ServiceError";
    this.status = status;
    this.missing = body.missing;
  }
}

export class DetectionClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  async health(): Promise<HealthResponse> {
    return this.request<HealthResponse>("GET", "/health");
  }

  async schema(): Promise<SchemaResponse> {
    return this.request<SchemaResponse>("GET", "/api/schema");
  }

  async predict(features: Record<string, number>): Promise<PredictResponse> {
    return this.request<PredictResponse>("POST", "/api/predict", { features });
  }

  /**
   * Issue one request and parse the JSON body.  Non-2xx responses raise
   * ServiceError; transport failures propagate as whatever fetch threw.
   */
  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let parsed: ServiceErrorBody = { error: `service returned ${response.status}`, missing: [] };
      try {
        const raw = (await response.json()) as Partial<ServiceErrorBody>;
        parsed = {
          error: typeof raw.error === "string" ? raw.error : parsed.error,
          missing: Array.isArray(raw.missing) ? raw.missing : [],
        };
      } catch {
        // Not JSON; keep the status-line message.
      }
      throw new ServiceError(response.status, parsed);
    }
    return (await response.json()) as T;
  }
}
