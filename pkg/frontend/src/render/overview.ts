/**
 * Three-strata traffic-light board. Tiles show the normalized value next to
 * the actual raw numbers behind it; no-data renders gray, clearly apart from
 * red. Every number comes straight from the snapshot payload.
 */

import { colorClass, formatInstant, formatRawSummary, formatValue } from "../format.js";
import type { ElementEntryDoc, ModelDoc, SnapshotDoc, StratumName } from "../types.js";

export interface OverviewHandlers {
  onSelect: (elementId: string) => void;
}

const STRATA: { stratum: StratumName; heading: string }[] = [
  { stratum: "aspect", heading: "Quality aspects" },
  { stratum: "factor", heading: "Factors" },
  { stratum: "metric", heading: "Assessed metrics" },
];

function elementName(model: ModelDoc | null, elementId: string): string {
  if (model) {
    for (const group of [model.aspects, model.factors, model.metrics]) {
      const hit = group.find((e) => e.id === elementId);
      if (hit) return hit.name;
    }
  }
  return elementId;
}

function orderedIds(model: ModelDoc | null, snapshot: SnapshotDoc, stratum: StratumName): string[] {
  if (model) {
    const group =
      stratum === "aspect" ? model.aspects : stratum === "factor" ? model.factors : model.metrics;
    return group.map((e) => e.id).filter((id) => snapshot.entries[id] !== undefined);
  }
  return Object.keys(snapshot.entries).filter((id) => snapshot.entries[id]!.stratum === stratum);
}

function renderTile(
  doc: Document,
  entry: ElementEntryDoc,
  name: string,
  handlers: OverviewHandlers,
): HTMLElement {
  const tile = doc.createElement("button");
  tile.type = "button";
  tile.className = `tile ${colorClass(entry.color)}`;
  tile.dataset.element = entry.element_id;
  tile.dataset.value = formatValue(entry.value);
  tile.dataset.color = entry.color;
  tile.addEventListener("click", () => handlers.onSelect(entry.element_id));

  const title = doc.createElement("span");
  title.className = "tile__name";
  title.textContent = name;

  const value = doc.createElement("span");
  value.className = "tile__value";
  value.textContent = `${formatValue(entry.value)} (${entry.color})`;

  tile.append(title, value);

  const actuals = formatRawSummary(entry.raw_summary);
  if (actuals) {
    const raw = doc.createElement("span");
    raw.className = "tile__raw";
    raw.textContent = actuals;
    tile.title = actuals;
    tile.append(raw);
  }
  return tile;
}

export interface OverviewContext {
  model: ModelDoc | null;
  offline: boolean;
  whatIfActive: boolean;
}

export function renderOverview(
  container: HTMLElement,
  snapshot: SnapshotDoc | null,
  context: OverviewContext,
  handlers: OverviewHandlers,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";

  if (context.offline) {
    const banner = doc.createElement("div");
    banner.className = "banner banner--offline";
    banner.textContent = snapshot
      ? "engine unreachable; showing stale data"
      : "engine unreachable";
    container.append(banner);
  }
  if (context.whatIfActive) {
    const banner = doc.createElement("div");
    banner.className = "banner banner--whatif";
    banner.dataset.role = "whatif-banner";
    banner.textContent = "what-if view: values computed under a draft model, nothing persisted";
    container.append(banner);
  }
  if (!snapshot) {
    const empty = doc.createElement("p");
    empty.className = "empty";
    empty.textContent = "no assessment yet";
    container.append(empty);
    return;
  }

  const meta = doc.createElement("p");
  meta.className = "overview__meta";
  const flag = snapshot.transient ? "transient what-if" : "persisted";
  meta.textContent =
    `${flag} snapshot, evaluated ${formatInstant(snapshot.evaluated_at)}, ` +
    `window ${formatInstant(snapshot.window.from)} .. ${formatInstant(snapshot.window.to)}`;
  container.append(meta);

  for (const { stratum, heading } of STRATA) {
    const ids = orderedIds(context.model, snapshot, stratum);
    if (ids.length === 0) continue;
    const section = doc.createElement("section");
    section.className = `stratum stratum--${stratum}`;
    const title = doc.createElement("h2");
    title.textContent = heading;
    section.append(title);
    const board = doc.createElement("div");
    board.className = "stratum__tiles";
    for (const elementId of ids) {
      const entry = snapshot.entries[elementId]!;
      board.append(renderTile(doc, entry, elementName(context.model, elementId), handlers));
    }
    section.append(board);
    container.append(section);
  }
}
