/**
 * What-if draft handling: building a delta from slider positions and the
 * client-side validity check that mirrors the server's weight-sum rule.
 * The server remains the oracle; this only keeps obviously-broken drafts
 * from producing a round trip.
 */

import type { ModelDoc, WhatIfDeltaDoc } from "./types.js";

export const WEIGHT_SUM_TOLERANCE = 1e-6;

export interface WeightDraft {
  /** parent id -> child id -> proposed weight */
  weights: Map<string, Map<string, number>>;
}

export function emptyDraft(): WeightDraft {
  return { weights: new Map() };
}

export function draftIsEmpty(draft: WeightDraft): boolean {
  return draft.weights.size === 0;
}

export function setDraftWeight(
  draft: WeightDraft,
  parent: string,
  child: string,
  weight: number,
): void {
  let children = draft.weights.get(parent);
  if (!children) {
    children = new Map();
    draft.weights.set(parent, children);
  }
  children.set(child, weight);
}

/** Effective child weights for a parent: draft values over model values. */
export function effectiveWeights(
  model: ModelDoc,
  draft: WeightDraft,
  parent: string,
): Map<string, number> {
  const weights = new Map<string, number>();
  for (const edge of model.edges) {
    if (edge.parent === parent) {
      weights.set(edge.child, edge.weight);
    }
  }
  const overrides = draft.weights.get(parent);
  if (overrides) {
    for (const [child, weight] of overrides) {
      if (weights.has(child)) {
        weights.set(child, weight);
      }
    }
  }
  return weights;
}

export interface DraftViolation {
  parent: string;
  message: string;
}

/** Mirror of the server rule: per parent, weights must sum to 1 (+/- 1e-6). */
export function validateDraft(model: ModelDoc, draft: WeightDraft): DraftViolation[] {
  const violations: DraftViolation[] = [];
  for (const parent of draft.weights.keys()) {
    const weights = effectiveWeights(model, draft, parent);
    if (weights.size === 0) {
      violations.push({ parent, message: `unknown parent ${parent}` });
      continue;
    }
    let sum = 0;
    for (const [child, weight] of weights) {
      if (weight <= 0 || weight > 1) {
        violations.push({ parent, message: `weight for ${child} outside (0, 1]` });
      }
      sum += weight;
    }
    if (Math.abs(sum - 1) > WEIGHT_SUM_TOLERANCE) {
      violations.push({ parent, message: `weights sum ${sum.toFixed(4)} != 1` });
    }
  }
  return violations;
}

/** The POST /whatif body for a draft, scoped to the persisted snapshot's window. */
export function draftToDelta(
  draft: WeightDraft,
  window?: { from: string; to: string },
): WhatIfDeltaDoc {
  const weights: Record<string, Record<string, number>> = {};
  for (const [parent, children] of draft.weights) {
    weights[parent] = Object.fromEntries(children);
  }
  const delta: WhatIfDeltaDoc = {};
  if (Object.keys(weights).length > 0) {
    delta.weights = weights;
  }
  if (window) {
    delta.from = window.from;
    delta.to = window.to;
  }
  return delta;
}
