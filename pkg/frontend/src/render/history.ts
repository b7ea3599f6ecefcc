/**
 * Per-element history: a plain SVG polyline over the [0, 1] scale with one
 * dot per snapshot, colored like its traffic light. Scales are layout only;
 * the plotted numbers are the API's.
 */

import { formatInstant, formatValue } from "../format.js";
import type { HistoryDoc } from "../types.js";

const WIDTH = 640;
const HEIGHT = 160;
const PAD = 24;
const SVG_NS = "http://www.w3.org/2000/svg";

export function renderHistory(container: HTMLElement, history: HistoryDoc | null): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  if (!history || history.points.length === 0) {
    const empty = doc.createElement("p");
    empty.className = "empty";
    empty.textContent = "no history yet";
    return void container.append(empty);
  }

  const heading = doc.createElement("h3");
  heading.textContent = `history: ${history.element}`;
  container.append(heading);

  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "history-chart");

  const plotted = history.points.filter((p) => p.value !== null);
  const n = history.points.length;
  const x = (index: number) =>
    n === 1 ? WIDTH / 2 : PAD + (index * (WIDTH - 2 * PAD)) / (n - 1);
  const y = (value: number) => HEIGHT - PAD - value * (HEIGHT - 2 * PAD);

  if (plotted.length > 1) {
    const line = doc.createElementNS(SVG_NS, "polyline");
    const coords = history.points
      .map((p, i) => (p.value === null ? null : `${x(i)},${y(p.value)}`))
      .filter((c): c is string => c !== null);
    line.setAttribute("points", coords.join(" "));
    line.setAttribute("fill", "none");
    line.setAttribute("class", "history-chart__line");
    svg.append(line);
  }

  history.points.forEach((point, index) => {
    if (point.value === null) return;
    const dot = doc.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(x(index)));
    dot.setAttribute("cy", String(y(point.value)));
    dot.setAttribute("r", "4");
    dot.setAttribute("class", `history-chart__dot history-chart__dot--${point.color}`);
    const title = doc.createElementNS(SVG_NS, "title");
    title.textContent = `${formatInstant(point.evaluated_at)}: ${formatValue(point.value)}`;
    dot.append(title);
    svg.append(dot);
  });
  container.append(svg);

  const list = doc.createElement("ol");
  list.className = "history-points";
  for (const point of history.points) {
    const item = doc.createElement("li");
    item.textContent = `${formatInstant(point.evaluated_at)}  ${formatValue(point.value)} (${point.color})`;
    list.append(item);
  }
  container.append(list);
}
