/**
 * Wire types mirroring the engine's HTTP+JSON documents.
 * The dashboard never computes quality values itself; these are read-only
 * shapes of what the API returns.
 */

export type ColorName = "green" | "orange" | "red" | "no-data";
export type StratumName = "aspect" | "factor" | "metric";

export interface OffenderDoc {
  entity: string;
  base_value: number;
  utility: number;
}

export interface ElementEntryDoc {
  element_id: string;
  stratum: StratumName;
  value: number | null;
  color: ColorName;
  raw_summary: Record<string, number>;
  offenders?: OffenderDoc[];
}

export interface SnapshotDoc {
  snapshot_id: string;
  evaluated_at: string;
  window: { from: string; to: string };
  transient: boolean;
  entries: Record<string, ElementEntryDoc>;
}

export interface DrilldownNodeDoc {
  element_id: string;
  name: string;
  stratum: StratumName;
  value: number | null;
  color: ColorName;
  weight_from_parent: number | null;
  contribution: number | null;
  raw_summary: Record<string, number>;
  offenders: OffenderDoc[];
  children: DrilldownNodeDoc[];
}

export interface AlertDoc {
  alert_id: string;
  element_id: string;
  stratum: StratumName;
  previous_color: ColorName;
  new_color: ColorName;
  value: number | null;
  threshold_crossed: "warning" | "critical";
  evaluated_at: string;
  acknowledged: boolean;
}

export interface HistoryPointDoc {
  evaluated_at: string;
  value: number | null;
  color: ColorName;
}

export interface HistoryDoc {
  element: string;
  points: HistoryPointDoc[];
}

export interface UtilityDoc {
  kind: "linear" | "step";
  points?: [number, number][];
  threshold?: number;
  below?: number;
  at_or_above?: number;
}

export interface ModelElementDoc {
  id: string;
  name: string;
  thresholds: { warning: number; critical: number };
}

export interface ModelMetricDoc extends ModelElementDoc {
  extractor: string;
  source_kind: string;
  utility: UtilityDoc;
  params: Record<string, unknown>;
  description?: string;
  window_days?: number;
}

export interface ModelEdgeDoc {
  parent: string;
  child: string;
  weight: number;
}

export interface ModelDoc {
  default_window_days: number;
  aspects: ModelElementDoc[];
  factors: ModelElementDoc[];
  metrics: ModelMetricDoc[];
  edges: ModelEdgeDoc[];
}

/** Body of POST /whatif; all sections optional. */
export interface WhatIfDeltaDoc {
  weights?: Record<string, Record<string, number>>;
  utilities?: Record<string, UtilityDoc>;
  thresholds?: Record<string, { warning: number; critical: number }>;
  params?: Record<string, Record<string, unknown>>;
  from?: string;
  to?: string;
  window_days?: number;
}

export interface ApiErrorDoc {
  status: number;
  code: string;
  detail: string;
  violations?: { element: string; message: string }[];
}
