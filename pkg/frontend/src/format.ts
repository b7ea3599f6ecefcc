/**
 * Display formatting only. Nothing in here derives quality values; it turns
 * API payload numbers into strings the way the engine's own CLI does.
 */

import type { ColorName } from "./types.js";

export function formatValue(value: number | null): string {
  return value === null ? "no-data" : value.toFixed(4);
}

export function formatWeight(weight: number | null): string {
  return weight === null ? "" : weight.toFixed(2);
}

export function formatPercentPoint(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(2);
}

export function formatRawSummary(summary: Record<string, number>): string {
  return Object.entries(summary)
    .map(([key, value]) => `${key}=${formatPercentPoint(value)}`)
    .join(", ");
}

export function formatInstant(iso: string): string {
  return iso.replace("T", " ").replace(/(\.\d+)?(Z|\+00:00)$/, " UTC");
}

export function colorClass(color: ColorName): string {
  return `tile--${color === "no-data" ? "nodata" : color}`;
}

export function colorLabel(color: ColorName): string {
  return color;
}
