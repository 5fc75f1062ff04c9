import { Client } from "./api.js";
import { createApp } from "./app.js";

// Served by the recommendation service itself, so same-origin API calls.
const client = new Client("");
const app = createApp(client);

document.getElementById("app")?.append(app.element);

void client
  .health()
  .then((health) => {
    const footer = document.getElementById("artifact");
    if (footer) footer.textContent = `model artifact ${health.artifact_hash.slice(0, 12)}`;
  })
  .catch(() => {
    const footer = document.getElementById("artifact");
    if (footer) footer.textContent = "service unreachable";
  });
