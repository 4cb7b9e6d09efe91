/** A frozen violated-cluster snapshot: one failed server edge (id 20) and a
 * client edge (id 15), with a session whose witness points at the client
 * and whose marked region covers everything. */
import type { SessionDoc, Snapshot } from "../src/model.js";

export function violatedSession(): SessionDoc {
  return {
    state: "awaiting-production-choice",
    invariant: "forall C(x). exists S(y, z). x = z",
    condition: "forall C(x). exists S(y, z). x = z",
    condition_assignment: {},
    candidates: [
      {
        production: "goodServer",
        edge: 20,
        psi: "forall C(x). (exists S(y, z). x = z | x = b)",
        assignment: { b: 2 },
      },
    ],
    parse_candidates: [31],
    marked_root: null,
    marked_edges: [20, 15],
    violation: { assignment: { x: 2 }, edges: [15] },
    decisions: 0,
    revision: 0,
  };
}

export function violatedSnapshot(): Snapshot {
  return {
    system: "cluster",
    revision: 0,
    graph: {
      nodes: [
        { id: 1, tau: "b", name: "v" },
        { id: 2, tau: "b", name: "u" },
      ],
      edges: [
        { id: 20, tau: "F", nodes: [1, 2], theta: 1, name: "f1" },
        { id: 15, tau: "C", nodes: [2], theta: 0, name: "c" },
      ],
    },
    forest: {
      roots: [30, 31],
      vertices: [
        { id: 30, children: [32], label: "[s(v,u), badServer]", edge: 10, nodes: [1, 2],
          tau: "S", production: "badServer", synthetic: false, tombstone: false, leaf: false },
        { id: 32, children: [], label: "[f1(v,u), ^]", edge: 20, nodes: [1, 2],
          tau: "F", production: null, synthetic: false, tombstone: false, leaf: true },
        { id: 31, children: [], label: "[c(u), ^]", edge: 15, nodes: [2],
          tau: "C", production: null, synthetic: false, tombstone: false, leaf: true },
      ],
    },
    session: violatedSession(),
  };
}
