/**
 * Drill-down panel: the weighted subtree under one element, children worst
 * first exactly as the API orders them, with offender tables on metric
 * leaves (file paths, issue ids, log sources and their raw values).
 */

import { colorClass, formatValue, formatWeight } from "../format.js";
import type { DrilldownNodeDoc } from "../types.js";

function renderOffenders(doc: Document, node: DrilldownNodeDoc): HTMLElement | null {
  if (node.offenders.length === 0) return null;
  const table = doc.createElement("table");
  table.className = "offenders";
  const head = doc.createElement("tr");
  for (const label of ["offending entity", "raw value", "utility"]) {
    const cell = doc.createElement("th");
    cell.textContent = label;
    head.append(cell);
  }
  table.append(head);
  for (const offender of node.offenders) {
    const row = doc.createElement("tr");
    row.dataset.entity = offender.entity;
    const cells = [
      offender.entity,
      String(offender.base_value),
      offender.utility.toFixed(2),
    ];
    for (const text of cells) {
      const cell = doc.createElement("td");
      cell.textContent = text;
      row.append(cell);
    }
    table.append(row);
  }
  return table;
}

function renderNode(doc: Document, node: DrilldownNodeDoc, depth: number): HTMLElement {
  const item = doc.createElement("div");
  item.className = `drill-node drill-node--${node.stratum}`;
  item.dataset.element = node.element_id;
  item.dataset.depth = String(depth);

  const row = doc.createElement("div");
  row.className = `drill-node__row ${colorClass(node.color)}`;
  const name = doc.createElement("span");
  name.className = "drill-node__name";
  name.textContent = node.name;
  const value = doc.createElement("span");
  value.className = "drill-node__value";
  value.textContent = `${formatValue(node.value)} (${node.color})`;
  row.append(name, value);
  if (node.weight_from_parent !== null) {
    const weight = doc.createElement("span");
    weight.className = "drill-node__weight";
    weight.textContent = `weight ${formatWeight(node.weight_from_parent)}`;
    row.append(weight);
  }
  if (node.contribution !== null) {
    const contribution = doc.createElement("span");
    contribution.className = "drill-node__contribution";
    contribution.textContent = `contributes ${formatValue(node.contribution)}`;
    row.append(contribution);
  }
  item.append(row);

  const offenders = renderOffenders(doc, node);
  if (offenders) item.append(offenders);

  if (node.children.length > 0) {
    const children = doc.createElement("div");
    children.className = "drill-node__children";
    for (const child of node.children) {
      children.append(renderNode(doc, child, depth + 1));
    }
    item.append(children);
  }
  return item;
}

export function renderDrilldown(
  container: HTMLElement,
  tree: DrilldownNodeDoc | null,
  error?: string,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  if (error) {
    const note = doc.createElement("p");
    note.className = "error";
    note.dataset.role = "drill-error";
    note.textContent = error;
    container.append(note);
  }
  if (!tree) {
    if (!error) {
      const hint = doc.createElement("p");
      hint.className = "empty";
      hint.textContent = "select an element to drill down";
      container.append(hint);
    }
    return;
  }
  if (tree.value === null && tree.children.length === 0) {
    const note = doc.createElement("p");
    note.className = "empty";
    note.textContent = "no data in window";
    container.append(note);
  }
  container.append(renderNode(doc, tree, 0));
}
