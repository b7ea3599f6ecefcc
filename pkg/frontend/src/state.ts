/**
 * Single view-state store with subscribe/notify. Transient what-if snapshots
 * are held in a separate slot and never overwrite the persisted one, so
 * reverting is just dropping the transient slot.
 */

import type { AlertDoc, ModelDoc, SnapshotDoc } from "./types.js";
import { emptyDraft, type WeightDraft } from "./whatif.js";

export interface ViewState {
  model: ModelDoc | null;
  persistedSnapshot: SnapshotDoc | null;
  /** Present only during a what-if session; always transient:true. */
  whatIfSnapshot: SnapshotDoc | null;
  whatIfDraft: WeightDraft;
  selectedElement: string | null;
  alerts: AlertDoc[];
  offline: boolean;
  lastError: string | null;
}

export type Listener = (state: ViewState) => void;

export class StateStore {
  private state: ViewState = {
    model: null,
    persistedSnapshot: null,
    whatIfSnapshot: null,
    whatIfDraft: emptyDraft(),
    selectedElement: null,
    alerts: [],
    offline: false,
    lastError: null,
  };
  private listeners: Listener[] = [];

  get(): ViewState {
    return this.state;
  }

  /** The snapshot the board renders from: transient wins while active. */
  activeSnapshot(): SnapshotDoc | null {
    return this.state.whatIfSnapshot ?? this.state.persistedSnapshot;
  }

  whatIfActive(): boolean {
    return this.state.whatIfSnapshot !== null;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  update(patch: Partial<ViewState>): void {
    if (patch.whatIfSnapshot && !patch.whatIfSnapshot.transient) {
      throw new Error("refusing to store a persisted snapshot in the what-if slot");
    }
    if (patch.persistedSnapshot && patch.persistedSnapshot.transient) {
      throw new Error("refusing to cache a transient snapshot as persisted");
    }
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  /** Drop the what-if session; the board falls back to the persisted view. */
  revertWhatIf(): void {
    this.update({ whatIfSnapshot: null, whatIfDraft: emptyDraft(), lastError: null });
  }
}
