import { ApiClient } from "./api.js";
import { App } from "./app.js";

const root = document.querySelector<HTMLDivElement>("#app");
if (!root) {
  throw new Error("Root element #app not found");
}

const app = new App(root, new ApiClient(""));
app.init().catch((error) => {
  const banner = document.createElement("div");
  banner.className = "error-banner";
  banner.textContent = `Could not reach the timeline service: ${error}`;
  root.appendChild(banner);
});

// handy for poking at the running app from the console
(window as unknown as { gentl: App }).gentl = app;
