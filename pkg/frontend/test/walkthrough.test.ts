/** End-to-end walkthrough against a live engine process.
 *
 * Spawns `adr serve` on a freshly generated broken-cluster workspace and
 * drives the real console code (jsdom DOM, real fetch): the violated graph
 * renders with the failed edge highlighted, the repair production is
 * offered, accepting it flips the panel to recovered, and a stale second
 * client hits the conflict path.
 */
import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ConflictError, WorkspaceClient } from "../src/api.js";
import { Console } from "../src/app.js";

const PORT = 8890 + (process.pid % 97);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;

async function up(): Promise<boolean> {
  try {
    const r = await fetch(`${BASE}/workspace`);
    return r.ok;
  } catch {
    return false;
  }
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), "adr-console-"));
  const wsPath = join(dir, "failover.json");
  const gen = spawnSync("python3", ["-m", "adr.cli", "demo-workspace", wsPath,
                                    "--kind", "failover"]);
  if (gen.status !== 0) {
    throw new Error(`demo-workspace failed: ${gen.stderr}`);
  }
  server = spawn("python3", ["-m", "adr.cli", "--workspace", wsPath,
                             "serve", "--port", String(PORT)],
                 { stdio: ["ignore", "pipe", "pipe"] });
  for (let i = 0; i < 100; i++) {
    if (await up()) return;
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("engine server did not come up");
});

afterAll(() => {
  server?.kill();
});

describe("the failover walkthrough", () => {
  it("renders the violation, offers the repair, reflects recovery", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const client = new WorkspaceClient(BASE);
    const ui = new Console(root, client, "cluster");

    // initial view: no session yet, the broken cluster renders
    await ui.refresh();
    expect(ui.snapshot!.graph.edges.map((e) => e.tau).sort()).toEqual(["C", "F"]);

    // open the session: state violated, candidates fetched, F edge highlighted
    await ui.submit({ kind: "start" });
    const session = ui.snapshot!.session!;
    expect(session.state).toBe("awaiting-production-choice");
    const failed = ui.snapshot!.graph.edges.find((e) => e.tau === "F")!;
    const failedBox = root.querySelector(`g[data-edge="${failed.id}"]`)!;
    expect(failedBox.getAttribute("class")).toContain("marked");
    expect(root.querySelector(".state-badge")!.textContent)
      .toBe("awaiting-production-choice");

    // the repair production is offered as a clickable candidate
    const offer = root.querySelector('[data-production="goodServer"]');
    expect(offer).not.toBeNull();
    const acceptButton = offer!.querySelector<HTMLButtonElement>("button.accept-button")!;
    expect(acceptButton.disabled).toBe(false);

    // accept it through the real DOM and wait for the round-trip
    acceptButton.click();
    for (let i = 0; i < 50 && ui.snapshot!.session?.state !== "recovered"; i++) {
      await new Promise((resolve) => setTimeout(resolve, 100));
    }
    expect(ui.snapshot!.session!.state).toBe("recovered");
    expect(root.querySelector(".state-badge")!.textContent).toBe("recovered");
    expect(ui.snapshot!.graph.edges.map((e) => e.tau).sort()).toEqual(["C", "S"]);
    expect(ui.snapshot!.revision).toBe(1);
  });

  it("a stale client hits the conflict answer", async () => {
    const stale = new WorkspaceClient(BASE);
    // acknowledge nothing: revision 0 is long gone after the recovery above
    await expect(stale.decide("cluster", { kind: "abandon" }))
      .rejects.toBeInstanceOf(ConflictError);
  });
});
