/**
 * Controller: wires the API client, the state store, and the render
 * functions together. Polls the persisted assessment on an interval, pauses
 * overwriting the board while a what-if session is active, and routes all
 * user actions through the engine so the server stays the single oracle.
 */

import { ApiClient, ApiError, EngineUnreachable } from "./api.js";
import { renderAlerts } from "./render/alerts.js";
import { renderDrilldown } from "./render/drilldown.js";
import { renderHistory } from "./render/history.js";
import { renderOverview } from "./render/overview.js";
import { renderWhatIfPanel } from "./render/whatifPanel.js";
import { StateStore } from "./state.js";
import type { DrilldownNodeDoc, HistoryDoc } from "./types.js";
import { draftToDelta, setDraftWeight } from "./whatif.js";

export const DEFAULT_POLL_MS = 30_000;

export interface AppElements {
  overview: HTMLElement;
  drilldown: HTMLElement;
  history: HTMLElement;
  alerts: HTMLElement;
  whatif: HTMLElement;
}

export class DashboardApp {
  readonly store = new StateStore();
  private drilldownTree: DrilldownNodeDoc | null = null;
  private drilldownError: string | undefined;
  private historyDoc: HistoryDoc | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    readonly api: ApiClient,
    readonly elements: AppElements,
    readonly pollMs: number = DEFAULT_POLL_MS,
  ) {
    this.store.subscribe(() => this.render());
  }

  async start(): Promise<void> {
    await this.refresh();
    if (this.pollMs > 0) {
      this.timer = setInterval(() => {
        void this.refresh();
      }, this.pollMs);
    }
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  /** Poll the persisted state; never clobbers an active what-if session view. */
  async refresh(): Promise<void> {
    try {
      const [model, alerts] = await Promise.all([this.api.model(), this.api.alerts()]);
      let snapshot = this.store.get().persistedSnapshot;
      try {
        snapshot = await this.api.currentSnapshot();
      } catch (err) {
        if (!(err instanceof ApiError && err.code === "no_snapshot")) throw err;
        snapshot = null;
      }
      this.store.update({
        model,
        alerts: alerts.alerts,
        persistedSnapshot: snapshot,
        offline: false,
      });
      const selected = this.store.get().selectedElement;
      if (selected && !this.store.whatIfActive()) {
        await this.select(selected);
      }
    } catch (err) {
      if (err instanceof EngineUnreachable) {
        this.store.update({ offline: true });
        return;
      }
      throw err;
    }
  }

  async select(elementId: string): Promise<void> {
    this.store.update({ selectedElement: elementId });
    try {
      this.drilldownTree = await this.api.drilldown(elementId);
      this.drilldownError = undefined;
    } catch (err) {
      if (err instanceof ApiError) {
        // keep the previous tree on screen; the error shows inline
        this.drilldownError = `${err.code}: ${err.message}`;
      } else if (err instanceof EngineUnreachable) {
        this.store.update({ offline: true });
        return;
      } else {
        throw err;
      }
    }
    try {
      this.historyDoc = await this.api.history(elementId);
    } catch {
      this.historyDoc = null;
    }
    this.render();
  }

  setWeight(parent: string, child: string, weight: number): void {
    const draft = this.store.get().whatIfDraft;
    setDraftWeight(draft, parent, child, weight);
    this.store.update({ whatIfDraft: draft });
  }

  /** POST the draft; the transient snapshot becomes the active board view. */
  async applyWhatIf(): Promise<void> {
    const state = this.store.get();
    const window = state.persistedSnapshot?.window;
    const delta = draftToDelta(state.whatIfDraft, window);
    try {
      const transient = await this.api.whatIf(delta);
      this.store.update({ whatIfSnapshot: transient, lastError: null });
    } catch (err) {
      if (err instanceof ApiError) {
        const details = err.violations.map((v) => `${v.element}: ${v.message}`).join("; ");
        this.store.update({ lastError: details || err.message });
        return;
      }
      throw err;
    }
  }

  revertWhatIf(): void {
    this.store.revertWhatIf();
  }

  async acknowledge(alertId: string): Promise<void> {
    await this.api.acknowledgeAlert(alertId);
    const alerts = await this.api.alerts();
    this.store.update({ alerts: alerts.alerts });
  }

  render(): void {
    const state = this.store.get();
    renderOverview(
      this.elements.overview,
      this.store.activeSnapshot(),
      { model: state.model, offline: state.offline, whatIfActive: this.store.whatIfActive() },
      { onSelect: (elementId) => void this.select(elementId) },
    );
    renderDrilldown(this.elements.drilldown, this.drilldownTree, this.drilldownError);
    renderHistory(this.elements.history, this.historyDoc);
    renderAlerts(this.elements.alerts, state.alerts, {
      onAcknowledge: (alertId) => void this.acknowledge(alertId),
      onInspect: (elementId) => void this.select(elementId),
    });
    renderWhatIfPanel(
      this.elements.whatif,
      state.model,
      state.whatIfDraft,
      this.store.whatIfActive(),
      {
        onWeightChange: (parent, child, weight) => this.setWeight(parent, child, weight),
        onApply: () => void this.applyWhatIf(),
        onRevert: () => this.revertWhatIf(),
      },
    );
    const errorSlot = this.elements.whatif.ownerDocument.querySelector("[data-role=whatif-error]");
    if (errorSlot) {
      errorSlot.textContent = state.lastError ?? "";
    }
  }
}
