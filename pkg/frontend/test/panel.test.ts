import { describe, expect, it } from "vitest";

import { renderPanel, type DecisionRequest } from "../src/panel.js";
import type { SessionStateName, Snapshot } from "../src/model.js";
import { violatedSnapshot } from "./fixtures.js";

function withState(state: SessionStateName): Snapshot {
  const snapshot = violatedSnapshot();
  snapshot.session = { ...snapshot.session!, state };
  return snapshot;
}

function buttons(panel: HTMLElement, className: string): HTMLButtonElement[] {
  return [...panel.querySelectorAll<HTMLButtonElement>(`button.${className}`)];
}

describe("decision gating", () => {
  it("accept enabled only while a production choice is pending", () => {
    for (const state of ["awaiting-production-choice"] as const) {
      const panel = renderPanel(document, withState(state), () => {});
      expect(buttons(panel, "accept-button").every((b) => !b.disabled)).toBe(true);
    }
    for (const state of ["awaiting-iterate-or-parse", "awaiting-subtree-choice",
                         "recovered", "abandoned"] as const) {
      const panel = renderPanel(document, withState(state), () => {});
      expect(buttons(panel, "accept-button").every((b) => b.disabled)).toBe(true);
    }
  });

  it("parse enabled in every awaiting state, not after the session closed", () => {
    for (const state of ["awaiting-production-choice", "awaiting-iterate-or-parse",
                         "awaiting-subtree-choice"] as const) {
      const panel = renderPanel(document, withState(state), () => {});
      expect(buttons(panel, "parse-button").every((b) => !b.disabled)).toBe(true);
    }
    const closed = renderPanel(document, withState("recovered"), () => {});
    expect(buttons(closed, "parse-button").every((b) => b.disabled)).toBe(true);
  });

  it("a session offers the repair production", () => {
    const panel = renderPanel(document, violatedSnapshot(), () => {});
    const row = panel.querySelector('[data-production="goodServer"]');
    expect(row).not.toBeNull();
    expect(row!.textContent).toContain("goodServer");
  });

  it("buttons map one-to-one onto decision kinds", () => {
    const seen: DecisionRequest[] = [];
    const panel = renderPanel(document, violatedSnapshot(), (d) => seen.push(d));
    buttons(panel, "accept-button")[0].click();
    buttons(panel, "iterate-button")[0].click();
    buttons(panel, "parse-button")[0].click();
    buttons(panel, "abandon-button")[0].click();
    expect(seen.map((d) => d.kind)).toEqual(["accept", "iterate", "parse", "abandon"]);
    expect(seen[0]).toEqual({ kind: "accept", production: "goodServer", edge: 20 });
    expect(seen[2]).toEqual({ kind: "parse", parent: 31 });
  });

  it("without a session only the start action exists", () => {
    const snapshot = violatedSnapshot();
    snapshot.session = null;
    const seen: DecisionRequest[] = [];
    const panel = renderPanel(document, snapshot, (d) => seen.push(d));
    expect(panel.querySelectorAll("button").length).toBe(1);
    buttons(panel, "start-button")[0].click();
    expect(seen).toEqual([{ kind: "start" }]);
  });

  it("shows the violation witness", () => {
    const panel = renderPanel(document, violatedSnapshot(), () => {});
    expect(panel.querySelector(".violation-witness")!.textContent).toContain("x -> node 2");
  });
});
