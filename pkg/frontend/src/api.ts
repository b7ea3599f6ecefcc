/**
 * Thin typed client over the engine's HTTP API.
 * Every dashboard value originates from one of these calls.
 */

import type {
  AlertDoc,
  ApiErrorDoc,
  DrilldownNodeDoc,
  HistoryDoc,
  ModelDoc,
  SnapshotDoc,
  WhatIfDeltaDoc,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly violations: { element: string; message: string }[];

  constructor(body: ApiErrorDoc) {
    super(body.detail);
    this.status = body.status;
    this.code = body.code;
    this.violations = body.violations ?? [];
  }
}

/** Raised when the engine cannot be reached at all (offline, DNS, refused). */
export class EngineUnreachable extends Error {}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, init);
    } catch (err) {
      throw new EngineUnreachable(`engine unreachable at ${this.baseUrl}: ${err}`);
    }
    if (!response.ok) {
      let body: ApiErrorDoc;
      try {
        body = (await response.json()) as ApiErrorDoc;
      } catch {
        body = { status: response.status, code: "http_error", detail: response.statusText };
      }
      throw new ApiError(body);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string; project: string }> {
    return this.request("/health");
  }

  currentSnapshot(): Promise<SnapshotDoc> {
    return this.request("/assessment/current");
  }

  history(element: string, fromIso?: string, toIso?: string): Promise<HistoryDoc> {
    const params = new URLSearchParams({ element });
    if (fromIso) params.set("from", fromIso);
    if (toIso) params.set("to", toIso);
    return this.request(`/assessment/history?${params}`);
  }

  drilldown(elementId: string): Promise<DrilldownNodeDoc> {
    return this.request(`/drilldown/${encodeURIComponent(elementId)}`);
  }

  alerts(since?: string): Promise<{ alerts: AlertDoc[] }> {
    const query = since ? `?since=${encodeURIComponent(since)}` : "";
    return this.request(`/alerts${query}`);
  }

  model(): Promise<ModelDoc> {
    return this.request("/model");
  }

  whatIf(delta: WhatIfDeltaDoc): Promise<SnapshotDoc> {
    return this.request("/whatif", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(delta),
    });
  }

  acknowledgeAlert(alertId: string): Promise<{ alert_id: string; acknowledged: boolean }> {
    return this.request(`/alerts/${encodeURIComponent(alertId)}/ack`, { method: "POST" });
  }

  triggerAssessment(): Promise<{ snapshot_id: string }> {
    return this.request("/assess", { method: "POST", body: "" });
  }
}
