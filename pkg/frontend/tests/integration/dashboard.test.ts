/**
 * Against a live demo engine: every value on the board must equal the API
 * payload, drill-down must list children worst first, and a what-if session
 * must render server-computed values and revert cleanly.
 */

import { beforeEach, describe, expect, inject, it } from "vitest";

import { ApiClient } from "../../src/api.js";
import { DashboardApp, type AppElements } from "../../src/app.js";
import { formatValue } from "../../src/format.js";
import type { SnapshotDoc } from "../../src/types.js";

const API_BASE = inject("apiBase");

function buildDom(): AppElements {
  document.body.innerHTML = `
    <div id="overview"></div>
    <div id="drilldown"></div>
    <div id="history"></div>
    <div id="alerts"></div>
    <div id="whatif"></div>
    <p data-role="whatif-error"></p>
  `;
  const byId = (id: string) => document.getElementById(id) as HTMLElement;
  return {
    overview: byId("overview"),
    drilldown: byId("drilldown"),
    history: byId("history"),
    alerts: byId("alerts"),
    whatif: byId("whatif"),
  };
}

async function startedApp(): Promise<DashboardApp> {
  const app = new DashboardApp(new ApiClient(API_BASE), buildDom(), 0);
  await app.refresh();
  return app;
}

describe("dashboard against a live engine", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("board values equal the /assessment/current payload", async () => {
    const app = await startedApp();
    const payload = (await (await fetch(`${API_BASE}/assessment/current`)).json()) as SnapshotDoc;
    const tiles = app.elements.overview.querySelectorAll<HTMLElement>(".tile");
    expect(tiles.length).toBe(Object.keys(payload.entries).length);
    for (const tile of tiles) {
      const entry = payload.entries[tile.dataset.element!];
      expect(entry, tile.dataset.element).toBeDefined();
      expect(tile.dataset.value).toBe(formatValue(entry!.value));
      expect(tile.dataset.color).toBe(entry!.color);
    }
    // the demo's second window: maintainability is orange at 0.6667
    const maintainability = app.elements.overview.querySelector<HTMLElement>(
      "[data-element=maintainability]",
    )!;
    expect(maintainability.dataset.value).toBe("0.6667");
    expect(maintainability.dataset.color).toBe("orange");
  });

  it("drill-down of maintainability lists children worst first with offenders", async () => {
    const app = await startedApp();
    await app.select("maintainability");
    const children = app.elements.drilldown.querySelectorAll<HTMLElement>("[data-depth='1']");
    expect([...children].map((c) => c.dataset.element)).toEqual(["blocking_code", "code_quality"]);
    const offenderRows = app.elements.drilldown.querySelectorAll<HTMLElement>(
      ".offenders tr[data-entity]",
    );
    const entities = [...offenderRows].map((r) => r.dataset.entity);
    expect(entities).toContain("src/core/alpha.c");
  });

  it("alert inbox shows the maintainability deterioration", async () => {
    const app = await startedApp();
    expect(app.elements.alerts.textContent).toContain("maintainability green → orange");
  });

  it("what-if renders server-computed values and revert restores the board", async () => {
    const app = await startedApp();
    const before = app.elements.overview.innerHTML;

    app.setWeight("blocking_code", "fulfillment_critical_blocker_rules", 0.8);
    app.setWeight("blocking_code", "highly_changed_files", 0.2);
    await app.applyWhatIf();

    // server is the oracle: ask it directly what this delta computes to
    const persisted = (await (await fetch(`${API_BASE}/assessment/current`)).json()) as SnapshotDoc;
    const response = await fetch(`${API_BASE}/whatif`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        weights: {
          blocking_code: { fulfillment_critical_blocker_rules: 0.8, highly_changed_files: 0.2 },
        },
        from: persisted.window.from,
        to: persisted.window.to,
      }),
    });
    const oracle = (await response.json()) as SnapshotDoc;
    expect(oracle.transient).toBe(true);

    expect(app.elements.overview.querySelector("[data-role=whatif-banner]")).not.toBeNull();
    const tiles = app.elements.overview.querySelectorAll<HTMLElement>(".tile");
    for (const tile of tiles) {
      const entry = oracle.entries[tile.dataset.element!]!;
      expect(tile.dataset.value).toBe(formatValue(entry.value));
    }
    const blocking = app.elements.overview.querySelector<HTMLElement>(
      "[data-element=blocking_code]",
    )!;
    expect(blocking.dataset.value).toBe(formatValue(0.8 * 0.2 + 0.2 * (2 / 3)));

    app.revertWhatIf();
    expect(app.elements.overview.querySelector("[data-role=whatif-banner]")).toBeNull();
    expect(app.elements.overview.innerHTML).toBe(before);

    // nothing persisted server-side
    const after = (await (await fetch(`${API_BASE}/assessment/current`)).json()) as SnapshotDoc;
    expect(after).toEqual(persisted);
  });

  it("invalid draft is stopped client-side before any request", async () => {
    const app = await startedApp();
    app.setWeight("blocking_code", "fulfillment_critical_blocker_rules", 0.9);
    app.render();
    const apply = app.elements.whatif.querySelector<HTMLButtonElement>(
      "[data-role=whatif-apply]",
    )!;
    expect(apply.disabled).toBe(true);
    expect(app.elements.whatif.textContent).toContain("weights sum");
  });
});
