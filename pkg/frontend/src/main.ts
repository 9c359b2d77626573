import { App } from "./app.js";

const app = new App();
app.start().catch((error) => {
  document.getElementById("status")!.textContent = `failed to start: ${error}`;
});
