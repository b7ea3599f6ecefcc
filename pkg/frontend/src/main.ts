/**
 * Browser bootstrap. The API base resolves, in order: the ?api= query
 * parameter, window.QGAUGE_API_BASE (settable by the hosting page), then the
 * page's own origin (for when the engine serves these assets itself).
 */

import { ApiClient } from "./api.js";
import { DashboardApp, type AppElements } from "./app.js";

declare global {
  interface Window {
    QGAUGE_API_BASE?: string;
    qgaugeApp?: DashboardApp;
  }
}

export function resolveApiBase(win: Window): string {
  const fromQuery = new URLSearchParams(win.location.search).get("api");
  const base = fromQuery || win.QGAUGE_API_BASE || win.location.origin;
  return base.replace(/\/+$/, "");
}

function requireElement(id: string): HTMLElement {
  const element = document.getElementById(id);
  if (!element) throw new Error(`dashboard page is missing #${id}`);
  return element;
}

export function bootstrap(): DashboardApp {
  const elements: AppElements = {
    overview: requireElement("overview"),
    drilldown: requireElement("drilldown"),
    history: requireElement("history"),
    alerts: requireElement("alerts"),
    whatif: requireElement("whatif"),
  };
  const app = new DashboardApp(new ApiClient(resolveApiBase(window)), elements);
  window.qgaugeApp = app;
  void app.start();
  return app;
}

if (typeof document !== "undefined" && document.getElementById("overview")) {
  bootstrap();
}
