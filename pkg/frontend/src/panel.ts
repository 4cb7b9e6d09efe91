/** The session panel: state badge, invariant/working condition, violation
 * witness, candidate list and the decision buttons.  Buttons are rendered
 * enabled only in the session states where the server would accept the
 * decision; every button maps 1:1 onto one decision kind.
 */
import type { SessionDoc, SessionStateName, Snapshot } from "./model.js";

export type DecisionRequest =
  | { kind: "accept"; production: string; edge: number }
  | { kind: "iterate"; production: string; edge: number }
  | { kind: "parse"; parent?: number }
  | { kind: "abandon" }
  | { kind: "start" };

export type DecisionHandler = (d: DecisionRequest) => void;

const CHOICE_STATES: SessionStateName[] = [
  "awaiting-production-choice",
];
const ITERATE_STATES: SessionStateName[] = [
  "awaiting-production-choice",
  "awaiting-iterate-or-parse",
];
const PARSE_STATES: SessionStateName[] = [
  "awaiting-production-choice",
  "awaiting-iterate-or-parse",
  "awaiting-subtree-choice",
];
const LIVE_STATES: SessionStateName[] = [
  "violated",
  ...PARSE_STATES,
];

function div(doc: Document, className: string, text?: string): HTMLDivElement {
  const node = doc.createElement("div");
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function button(doc: Document, label: string, className: string, enabled: boolean,
                onClick: () => void): HTMLButtonElement {
  const b = doc.createElement("button");
  b.textContent = label;
  b.className = className;
  b.disabled = !enabled;
  b.addEventListener("click", onClick);
  return b;
}

export function renderPanel(doc: Document, snapshot: Snapshot,
                            onDecision: DecisionHandler): HTMLElement {
  const panel = div(doc, "session-panel");
  panel.appendChild(div(doc, "panel-title", `system: ${snapshot.system}`));
  panel.setAttribute("data-revision", String(snapshot.revision));

  const session = snapshot.session;
  if (!session) {
    panel.appendChild(div(doc, "state-badge idle", "no active session"));
    panel.appendChild(button(doc, "check the style invariant", "start-button", true,
                             () => onDecision({ kind: "start" })));
    return panel;
  }

  panel.appendChild(div(doc, `state-badge ${session.state}`, session.state));
  panel.appendChild(div(doc, "invariant", `invariant: ${session.invariant}`));
  if (session.condition !== session.invariant) {
    panel.appendChild(div(doc, "condition", `working condition: ${session.condition}`));
  }
  if (session.violation) {
    const binding = Object.entries(session.violation.assignment)
      .map(([v, n]) => `${v} -> node ${n}`).join(", ");
    panel.appendChild(div(doc, "violation-witness",
                          `violation witness: [${binding}] via edges ${session.violation.edges.join(", ")}`));
  }

  const canChoose = CHOICE_STATES.includes(session.state);
  const canIterate = ITERATE_STATES.includes(session.state);
  const list = div(doc, "candidates");
  list.appendChild(div(doc, "candidates-title",
                       session.candidates.length ? "candidate productions" : "no candidates offered"));
  for (const c of session.candidates) {
    const row = div(doc, "candidate");
    row.setAttribute("data-production", c.production);
    row.setAttribute("data-edge", String(c.edge));
    row.appendChild(div(doc, "candidate-desc",
                        `${c.production} @ edge ${c.edge}  (requires: ${c.psi})`));
    row.appendChild(button(doc, "accept", "accept-button", canChoose,
                           () => onDecision({ kind: "accept", production: c.production, edge: c.edge })));
    row.appendChild(button(doc, "iterate", "iterate-button", canIterate,
                           () => onDecision({ kind: "iterate", production: c.production, edge: c.edge })));
    list.appendChild(row);
  }
  panel.appendChild(list);

  const canParse = PARSE_STATES.includes(session.state);
  const folds = div(doc, "parse-candidates");
  folds.appendChild(div(doc, "candidates-title",
                        session.parse_candidates.length ? "foldable subtrees" : "nothing to fold"));
  for (const parent of session.parse_candidates) {
    const row = div(doc, "parse-candidate");
    row.setAttribute("data-parent", String(parent));
    row.appendChild(div(doc, "candidate-desc", `fold the expansion at vertex ${parent}`));
    row.appendChild(button(doc, "parse", "parse-button", canParse,
                           () => onDecision({ kind: "parse", parent })));
    folds.appendChild(row);
  }
  panel.appendChild(folds);

  panel.appendChild(button(doc, "abandon", "abandon-button",
                           LIVE_STATES.includes(session.state),
                           () => onDecision({ kind: "abandon" })));
  if (session.state === "recovered" || session.state === "abandoned") {
    panel.appendChild(button(doc, "start again", "start-button", true,
                             () => onDecision({ kind: "start" })));
  }
  return panel;
}
