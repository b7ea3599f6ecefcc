/**
 * What-if controls: one slider per edge weight, grouped by parent, with the
 * client-side sum check inline and apply/revert actions. Apply posts the
 * draft to the engine; rendered numbers always come back from the server.
 */

import type { ModelDoc } from "../types.js";
import {
  draftIsEmpty,
  effectiveWeights,
  validateDraft,
  type DraftViolation,
  type WeightDraft,
} from "../whatif.js";

export interface WhatIfHandlers {
  onWeightChange: (parent: string, child: string, weight: number) => void;
  onApply: () => void;
  onRevert: () => void;
}

export function renderWhatIfPanel(
  container: HTMLElement,
  model: ModelDoc | null,
  draft: WeightDraft,
  active: boolean,
  handlers: WhatIfHandlers,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  if (!model) return;

  const heading = doc.createElement("h2");
  heading.textContent = "what-if: edge weights";
  container.append(heading);

  const violations = validateDraft(model, draft);
  const violationsByParent = new Map<string, DraftViolation[]>();
  for (const violation of violations) {
    const existing = violationsByParent.get(violation.parent) ?? [];
    existing.push(violation);
    violationsByParent.set(violation.parent, existing);
  }

  const parents = new Map<string, string[]>();
  for (const edge of model.edges) {
    const children = parents.get(edge.parent) ?? [];
    children.push(edge.child);
    parents.set(edge.parent, children);
  }

  for (const [parent, children] of parents) {
    if (children.length < 2) continue; // a single child is pinned to weight 1
    const group = doc.createElement("fieldset");
    group.className = "whatif-group";
    group.dataset.parent = parent;
    const legend = doc.createElement("legend");
    legend.textContent = parent;
    group.append(legend);

    const weights = effectiveWeights(model, draft, parent);
    let sum = 0;
    for (const weight of weights.values()) sum += weight;

    for (const child of children) {
      const weight = weights.get(child) ?? 0;
      const row = doc.createElement("label");
      row.className = "whatif-row";
      const caption = doc.createElement("span");
      caption.textContent = child;
      const slider = doc.createElement("input");
      slider.type = "range";
      slider.min = "0.01";
      slider.max = "1";
      slider.step = "0.01";
      slider.value = String(weight);
      slider.dataset.parent = parent;
      slider.dataset.child = child;
      slider.addEventListener("input", () =>
        handlers.onWeightChange(parent, child, Number(slider.value)),
      );
      const readout = doc.createElement("output");
      readout.textContent = weight.toFixed(2);
      row.append(caption, slider, readout);
      group.append(row);
    }

    const sumNote = doc.createElement("p");
    sumNote.className = "whatif-sum";
    sumNote.dataset.parent = parent;
    sumNote.textContent = `sum ${sum.toFixed(2)}`;
    group.append(sumNote);

    const parentViolations = violationsByParent.get(parent) ?? [];
    for (const violation of parentViolations) {
      const note = doc.createElement("p");
      note.className = "error whatif-violation";
      note.dataset.parent = parent;
      note.textContent = violation.message;
      group.append(note);
    }
    container.append(group);
  }

  const actions = doc.createElement("div");
  actions.className = "whatif-actions";

  const apply = doc.createElement("button");
  apply.type = "button";
  apply.dataset.role = "whatif-apply";
  apply.textContent = "recompute (server-side)";
  apply.disabled = draftIsEmpty(draft) || violations.length > 0;
  apply.addEventListener("click", () => handlers.onApply());
  actions.append(apply);

  if (active || !draftIsEmpty(draft)) {
    const revert = doc.createElement("button");
    revert.type = "button";
    revert.dataset.role = "whatif-revert";
    revert.textContent = "revert to persisted view";
    revert.addEventListener("click", () => handlers.onRevert());
    actions.append(revert);
  }
  container.append(actions);
}
