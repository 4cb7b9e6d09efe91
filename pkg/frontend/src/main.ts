/** Browser entry point: ?api=http://127.0.0.1:8722&system=cluster */
import { WorkspaceClient } from "./api.js";
import { Console } from "./app.js";

const params = new URLSearchParams(window.location.search);
const api = params.get("api") ?? "http://127.0.0.1:8722";
const system = params.get("system") ?? "cluster";

const root = document.getElementById("console");
if (!root) throw new Error("missing #console element");

const console_ = new Console(root, new WorkspaceClient(api), system, {
  pollMs: Number(params.get("poll") ?? 2000),
});
console_.start();
