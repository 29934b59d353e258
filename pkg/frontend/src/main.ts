/** Page entry point: mount the app against the service named by ?api=. */

import { Api } from "./api.js";
import { App } from "./app.js";

export function serviceBase(locationHref: string): string {
  const url = new URL(locationHref);
  const override = url.searchParams.get("api");
  if (override) return override.replace(/\/+$/, "");
  // static dev hosts (file://, http.server) are not the game service
  if (url.protocol !== "http:" && url.protocol !== "https:") {
    return "http://127.0.0.1:8000";
  }
  if (url.port === "8000") return url.origin;
  return "http://127.0.0.1:8000";
}

const root = document.getElementById("app");
if (root) {
  new App(root, new Api(serviceBase(window.location.href)));
}
