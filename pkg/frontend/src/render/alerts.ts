/**
 * Alert inbox: deterioration transitions newest first, with acknowledge
 * buttons and a jump into the drill-down of the alerting element.
 */

import { formatInstant, formatValue } from "../format.js";
import type { AlertDoc } from "../types.js";

export interface AlertHandlers {
  onAcknowledge: (alertId: string) => void;
  onInspect: (elementId: string) => void;
}

export function renderAlerts(
  container: HTMLElement,
  alerts: AlertDoc[],
  handlers: AlertHandlers,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  if (alerts.length === 0) {
    const empty = doc.createElement("p");
    empty.className = "empty";
    empty.textContent = "no alerts";
    container.append(empty);
    return;
  }
  const list = doc.createElement("ul");
  list.className = "alerts";
  for (const alert of alerts) {
    const item = doc.createElement("li");
    item.className = `alert alert--${alert.new_color}${alert.acknowledged ? " alert--acked" : ""}`;
    item.dataset.alertId = alert.alert_id;

    const text = doc.createElement("span");
    text.textContent =
      `${alert.element_id} ${alert.previous_color} → ${alert.new_color} ` +
      `(${alert.threshold_crossed}, value ${formatValue(alert.value)}, ` +
      `${formatInstant(alert.evaluated_at)})`;
    item.append(text);

    const inspect = doc.createElement("button");
    inspect.type = "button";
    inspect.textContent = "drill down";
    inspect.addEventListener("click", () => handlers.onInspect(alert.element_id));
    item.append(inspect);

    if (!alert.acknowledged) {
      const ack = doc.createElement("button");
      ack.type = "button";
      ack.dataset.role = "ack";
      ack.textContent = "acknowledge";
      ack.addEventListener("click", () => handlers.onAcknowledge(alert.alert_id));
      item.append(ack);
    }
    list.append(item);
  }
  container.append(list);
}
