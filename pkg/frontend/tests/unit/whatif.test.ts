import { describe, expect, it } from "vitest";

import type { ModelDoc } from "../../src/types.js";
import {
  draftToDelta,
  effectiveWeights,
  emptyDraft,
  setDraftWeight,
  validateDraft,
} from "../../src/whatif.js";

const MODEL: ModelDoc = {
  default_window_days: 7,
  aspects: [{ id: "maintainability", name: "Maintainability", thresholds: { warning: 0.67, critical: 0.33 } }],
  factors: [
    { id: "code_quality", name: "Code Quality", thresholds: { warning: 0.67, critical: 0.33 } },
    { id: "blocking_code", name: "Blocking Code", thresholds: { warning: 0.67, critical: 0.33 } },
  ],
  metrics: [],
  edges: [
    { parent: "maintainability", child: "code_quality", weight: 0.5 },
    { parent: "maintainability", child: "blocking_code", weight: 0.5 },
  ],
};

describe("effectiveWeights", () => {
  it("returns model weights when the draft is empty", () => {
    const weights = effectiveWeights(MODEL, emptyDraft(), "maintainability");
    expect(weights.get("code_quality")).toBe(0.5);
    expect(weights.get("blocking_code")).toBe(0.5);
  });

  it("overlays draft values", () => {
    const draft = emptyDraft();
    setDraftWeight(draft, "maintainability", "code_quality", 0.8);
    const weights = effectiveWeights(MODEL, draft, "maintainability");
    expect(weights.get("code_quality")).toBe(0.8);
    expect(weights.get("blocking_code")).toBe(0.5);
  });

  it("ignores draft children the model does not know", () => {
    const draft = emptyDraft();
    setDraftWeight(draft, "maintainability", "nonsense", 0.8);
    const weights = effectiveWeights(MODEL, draft, "maintainability");
    expect(weights.has("nonsense")).toBe(false);
  });
});

describe("validateDraft (mirror of the server sum rule)", () => {
  it("accepts a compensated shift", () => {
    const draft = emptyDraft();
    setDraftWeight(draft, "maintainability", "code_quality", 0.8);
    setDraftWeight(draft, "maintainability", "blocking_code", 0.2);
    expect(validateDraft(MODEL, draft)).toEqual([]);
  });

  it("rejects weights that stop summing to one", () => {
    const draft = emptyDraft();
    setDraftWeight(draft, "maintainability", "code_quality", 0.8);
    const violations = validateDraft(MODEL, draft);
    expect(violations).toHaveLength(1);
    expect(violations[0]!.message).toContain("weights sum 1.3000");
  });

  it("rejects out-of-range weights", () => {
    const draft = emptyDraft();
    setDraftWeight(draft, "maintainability", "code_quality", 1.5);
    setDraftWeight(draft, "maintainability", "blocking_code", -0.5);
    const messages = validateDraft(MODEL, draft).map((v) => v.message);
    expect(messages.some((m) => m.includes("outside (0, 1]"))).toBe(true);
  });

  it("flags unknown parents", () => {
    const draft = emptyDraft();
    setDraftWeight(draft, "nonsense", "code_quality", 1.0);
    expect(validateDraft(MODEL, draft)[0]!.message).toContain("unknown parent");
  });

  it("tolerates float dust within 1e-6", () => {
    const draft = emptyDraft();
    setDraftWeight(draft, "maintainability", "code_quality", 0.3 + 0.3 + 0.1); // 0.7000000000000001
    setDraftWeight(draft, "maintainability", "blocking_code", 0.3);
    expect(validateDraft(MODEL, draft)).toEqual([]);
  });
});

describe("draftToDelta", () => {
  it("scopes the delta to the persisted window", () => {
    const draft = emptyDraft();
    setDraftWeight(draft, "maintainability", "code_quality", 0.8);
    const delta = draftToDelta(draft, { from: "2018-01-08T00:00:00Z", to: "2018-01-15T00:00:00Z" });
    expect(delta.weights).toEqual({ maintainability: { code_quality: 0.8 } });
    expect(delta.from).toBe("2018-01-08T00:00:00Z");
    expect(delta.to).toBe("2018-01-15T00:00:00Z");
  });

  it("empty draft produces an empty delta body", () => {
    expect(draftToDelta(emptyDraft())).toEqual({});
  });
});
