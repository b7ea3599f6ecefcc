import { beforeEach, describe, expect, it, vi } from "vitest";

import { formatRawSummary, formatValue } from "../../src/format.js";
import { renderAlerts } from "../../src/render/alerts.js";
import { renderDrilldown } from "../../src/render/drilldown.js";
import { renderOverview } from "../../src/render/overview.js";
import { renderWhatIfPanel } from "../../src/render/whatifPanel.js";
import { emptyDraft, setDraftWeight } from "../../src/whatif.js";
import type { AlertDoc, DrilldownNodeDoc, ModelDoc, SnapshotDoc } from "../../src/types.js";

const SNAPSHOT: SnapshotDoc = {
  snapshot_id: "abc",
  evaluated_at: "2018-01-15T00:00:00Z",
  window: { from: "2018-01-08T00:00:00Z", to: "2018-01-15T00:00:00Z" },
  transient: false,
  entries: {
    maintainability: {
      element_id: "maintainability",
      stratum: "aspect",
      value: 0.6666666666666666,
      color: "orange",
      raw_summary: { children: 2, children_with_data: 2 },
    },
    code_quality: {
      element_id: "code_quality",
      stratum: "factor",
      value: 0.9,
      color: "green",
      raw_summary: { children: 3, children_with_data: 3 },
    },
    non_complex_files: {
      element_id: "non_complex_files",
      stratum: "metric",
      value: 0.9,
      color: "green",
      raw_summary: { files: 10, mean_complexity: 5.64 },
    },
    errors_at_runtime: {
      element_id: "errors_at_runtime",
      stratum: "metric",
      value: null,
      color: "no-data",
      raw_summary: { log_entries: 0 },
    },
  },
};

const MODEL: ModelDoc = {
  default_window_days: 7,
  aspects: [{ id: "maintainability", name: "Maintainability", thresholds: { warning: 0.67, critical: 0.33 } }],
  factors: [{ id: "code_quality", name: "Code Quality", thresholds: { warning: 0.67, critical: 0.33 } }],
  metrics: [],
  edges: [
    { parent: "maintainability", child: "code_quality", weight: 0.5 },
    { parent: "maintainability", child: "blocking_code", weight: 0.5 },
  ],
};

function container(): HTMLElement {
  const div = document.createElement("div");
  document.body.append(div);
  return div;
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("renderOverview", () => {
  it("shows every entry's value exactly as formatted from the payload", () => {
    const target = container();
    renderOverview(target, SNAPSHOT, { model: null, offline: false, whatIfActive: false }, { onSelect: () => {} });
    const tiles = target.querySelectorAll<HTMLElement>(".tile");
    expect(tiles.length).toBe(4);
    for (const tile of tiles) {
      const entry = SNAPSHOT.entries[tile.dataset.element!]!;
      expect(tile.dataset.value).toBe(formatValue(entry.value));
      expect(tile.textContent).toContain(formatValue(entry.value));
      expect(tile.textContent).toContain(formatRawSummary(entry.raw_summary));
    }
  });

  it("renders no-data distinctly from red", () => {
    const target = container();
    renderOverview(target, SNAPSHOT, { model: null, offline: false, whatIfActive: false }, { onSelect: () => {} });
    const nodata = target.querySelector("[data-element=errors_at_runtime]")!;
    expect(nodata.className).toContain("tile--nodata");
    expect(nodata.className).not.toContain("tile--red");
    expect(nodata.textContent).toContain("no-data");
  });

  it("offline shows a banner and labels data stale", () => {
    const target = container();
    renderOverview(target, SNAPSHOT, { model: null, offline: true, whatIfActive: false }, { onSelect: () => {} });
    expect(target.querySelector(".banner--offline")!.textContent).toContain("stale");
  });

  it("what-if session shows the transient banner", () => {
    const target = container();
    renderOverview(target, { ...SNAPSHOT, transient: true }, { model: null, offline: false, whatIfActive: true }, { onSelect: () => {} });
    expect(target.querySelector("[data-role=whatif-banner]")).not.toBeNull();
    expect(target.textContent).toContain("transient what-if");
  });

  it("clicking a tile selects the element", () => {
    const target = container();
    const onSelect = vi.fn();
    renderOverview(target, SNAPSHOT, { model: null, offline: false, whatIfActive: false }, { onSelect });
    (target.querySelector("[data-element=maintainability]") as HTMLElement).click();
    expect(onSelect).toHaveBeenCalledWith("maintainability");
  });
});

const TREE: DrilldownNodeDoc = {
  element_id: "maintainability",
  name: "Maintainability",
  stratum: "aspect",
  value: 0.6666666666666666,
  color: "orange",
  weight_from_parent: null,
  contribution: null,
  raw_summary: {},
  offenders: [],
  children: [
    {
      element_id: "blocking_code",
      name: "Blocking Code",
      stratum: "factor",
      value: 0.43333333333333335,
      color: "orange",
      weight_from_parent: 0.5,
      contribution: 0.21666666666666667,
      raw_summary: {},
      offenders: [],
      children: [
        {
          element_id: "fulfillment_critical_blocker_rules",
          name: "Rule fulfillment",
          stratum: "metric",
          value: 0.2,
          color: "red",
          weight_from_parent: 0.5,
          contribution: 0.1,
          raw_summary: { files: 10 },
          offenders: [
            { entity: "src/core/alpha.c", base_value: 2, utility: 0 },
            { entity: "src/core/beta.c", base_value: 1, utility: 0 },
          ],
          children: [],
        },
      ],
    },
    {
      element_id: "code_quality",
      name: "Code Quality",
      stratum: "factor",
      value: 0.9,
      color: "green",
      weight_from_parent: 0.5,
      contribution: 0.45,
      raw_summary: {},
      offenders: [],
      children: [],
    },
  ],
};

describe("renderDrilldown", () => {
  it("keeps the API's worst-first child order", () => {
    const target = container();
    renderDrilldown(target, TREE);
    const children = target.querySelectorAll<HTMLElement>("[data-depth='1']");
    expect([...children].map((c) => c.dataset.element)).toEqual(["blocking_code", "code_quality"]);
  });

  it("renders offender tables on metric leaves", () => {
    const target = container();
    renderDrilldown(target, TREE);
    const rows = target.querySelectorAll<HTMLElement>(".offenders tr[data-entity]");
    expect([...rows].map((r) => r.dataset.entity)).toEqual(["src/core/alpha.c", "src/core/beta.c"]);
    expect(rows[0]!.textContent).toContain("2");
  });

  it("inline error keeps the previous tree on screen", () => {
    const target = container();
    renderDrilldown(target, TREE, "unknown_element: no element 'nope'");
    expect(target.querySelector("[data-role=drill-error]")!.textContent).toContain("unknown_element");
    expect(target.querySelector("[data-element=maintainability]")).not.toBeNull();
  });

  it("no-data element renders the empty-window note", () => {
    const target = container();
    renderDrilldown(target, {
      ...TREE,
      value: null,
      color: "no-data",
      children: [],
    });
    expect(target.textContent).toContain("no data in window");
  });
});

describe("renderAlerts", () => {
  const ALERT: AlertDoc = {
    alert_id: "a1",
    element_id: "maintainability",
    stratum: "aspect",
    previous_color: "green",
    new_color: "orange",
    value: 0.6666666666666666,
    threshold_crossed: "warning",
    evaluated_at: "2018-01-15T00:00:00Z",
    acknowledged: false,
  };

  it("lists transitions and wires the ack button", () => {
    const target = container();
    const onAcknowledge = vi.fn();
    renderAlerts(target, [ALERT], { onAcknowledge, onInspect: () => {} });
    expect(target.textContent).toContain("green → orange");
    (target.querySelector("[data-role=ack]") as HTMLElement).click();
    expect(onAcknowledge).toHaveBeenCalledWith("a1");
  });

  it("acknowledged alerts lose the ack button", () => {
    const target = container();
    renderAlerts(target, [{ ...ALERT, acknowledged: true }], {
      onAcknowledge: () => {},
      onInspect: () => {},
    });
    expect(target.querySelector("[data-role=ack]")).toBeNull();
  });
});

describe("renderWhatIfPanel", () => {
  it("shows inline violations next to the offending group and disables apply", () => {
    const target = container();
    const draft = emptyDraft();
    setDraftWeight(draft, "maintainability", "code_quality", 0.9);
    renderWhatIfPanel(target, MODEL, draft, false, {
      onWeightChange: () => {},
      onApply: () => {},
      onRevert: () => {},
    });
    const violation = target.querySelector<HTMLElement>(".whatif-violation");
    expect(violation!.dataset.parent).toBe("maintainability");
    expect(violation!.textContent).toContain("weights sum 1.4000");
    const apply = target.querySelector<HTMLButtonElement>("[data-role=whatif-apply]")!;
    expect(apply.disabled).toBe(true);
  });

  it("valid compensated draft enables apply", () => {
    const target = container();
    const draft = emptyDraft();
    setDraftWeight(draft, "maintainability", "code_quality", 0.8);
    setDraftWeight(draft, "maintainability", "blocking_code", 0.2);
    renderWhatIfPanel(target, MODEL, draft, false, {
      onWeightChange: () => {},
      onApply: () => {},
      onRevert: () => {},
    });
    expect(target.querySelector<HTMLButtonElement>("[data-role=whatif-apply]")!.disabled).toBe(false);
  });
});
