/** The console controller.
 *
 * State lives on the server; this class polls snapshots (graph + forest +
 * session, coherent at one revision), re-renders deterministically, and
 * translates button presses into decision POSTs.  A 409 from the server —
 * someone else advanced the system — triggers a refresh and a re-prompt
 * banner instead of a retry, so the designer always decides against what is
 * actually there.
 */
import { ConflictError, WorkspaceClient } from "./api.js";
import type { SessionStateName, Snapshot } from "./model.js";
import { renderPanel, type DecisionRequest } from "./panel.js";
import { renderGraph, renderForest } from "./render.js";

export interface ConsoleOptions {
  pollMs?: number;
  invariant?: string;
}

export class Console {
  snapshot: Snapshot | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  private busy = false;

  constructor(
    readonly root: HTMLElement,
    readonly client: WorkspaceClient,
    readonly system: string,
    readonly options: ConsoleOptions = {},
  ) {}

  start(): void {
    void this.refresh();
    this.timer = setInterval(() => void this.refresh(), this.options.pollMs ?? 2000);
  }

  stop(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }

  async refresh(): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    try {
      const snapshot = await this.client.snapshot(this.system);
      // a violated session has candidates pending server-side; fetch them
      if (snapshot.session?.state === "violated") {
        const extra = await this.client.candidates(this.system);
        snapshot.session = {
          ...snapshot.session,
          state: extra.state as SessionStateName,
          candidates: extra.candidates,
          parse_candidates: extra.parse_candidates,
        };
      }
      if (this.snapshot && snapshot.revision < this.snapshot.revision) {
        return; // never render anything older than what was acknowledged
      }
      this.snapshot = snapshot;
      this.render();
      this.clearBanner();
    } catch (err) {
      this.banner(`connection trouble: ${(err as Error).message}`, "error");
    } finally {
      this.busy = false;
    }
  }

  async submit(decision: DecisionRequest): Promise<void> {
    try {
      if (decision.kind === "start") {
        await this.client.startRecovery(this.system, this.options.invariant);
      } else {
        await this.client.decide(this.system, decision);
      }
      await this.refresh();
    } catch (err) {
      if (err instanceof ConflictError) {
        // someone else moved first: show what is actually there, then re-prompt
        await this.refresh();
        this.banner("someone else moved first; the view was refreshed, please re-decide",
                    "conflict");
        return;
      }
      this.banner(`the server refused: ${(err as Error).message}`, "error");
    }
  }

  render(): void {
    if (!this.snapshot) return;
    const doc = this.root.ownerDocument;
    this.root.textContent = "";

    const banner = doc.createElement("div");
    banner.className = "banner hidden";
    this.root.appendChild(banner);

    const graphPane = doc.createElement("section");
    graphPane.className = "pane graph-pane";
    graphPane.appendChild(renderGraph(doc, this.snapshot));
    this.root.appendChild(graphPane);

    const forestPane = doc.createElement("section");
    forestPane.className = "pane forest-pane";
    forestPane.appendChild(renderForest(doc, this.snapshot));
    this.root.appendChild(forestPane);

    const panelPane = doc.createElement("section");
    panelPane.className = "pane panel-pane";
    panelPane.appendChild(renderPanel(doc, this.snapshot, (d) => void this.submit(d)));
    this.root.appendChild(panelPane);
  }

  banner(message: string, kind: "conflict" | "error"): void {
    const node = this.root.querySelector<HTMLElement>(".banner");
    if (!node) return;
    node.textContent = message;
    node.className = `banner ${kind}`;
  }

  clearBanner(): void {
    const node = this.root.querySelector<HTMLElement>(".banner");
    if (node) node.className = "banner hidden";
  }
}
