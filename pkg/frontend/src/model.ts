/** Wire types mirrored from the HTTP session API. */

export interface NodeDoc {
  id: number;
  tau: string;
  name: string | null;
}

export interface EdgeDoc {
  id: number;
  tau: string;
  nodes: number[];
  theta: number;
  name: string | null;
}

export interface GraphDoc {
  nodes: NodeDoc[];
  edges: EdgeDoc[];
}

export interface ForestVertexDoc {
  id: number;
  children: number[];
  label: string;
  edge: number | null;
  nodes: number[] | null;
  tau: string | null;
  production: string | null;
  synthetic: boolean;
  tombstone: boolean;
  leaf: boolean;
}

export interface ForestDoc {
  roots: number[];
  vertices: ForestVertexDoc[];
}

export interface CandidateDoc {
  production: string;
  edge: number;
  psi: string;
  assignment: Record<string, number>;
}

export type SessionStateName =
  | "idle"
  | "violated"
  | "awaiting-production-choice"
  | "awaiting-iterate-or-parse"
  | "awaiting-subtree-choice"
  | "recovered"
  | "abandoned";

export interface SessionDoc {
  state: SessionStateName;
  invariant: string;
  condition: string;
  condition_assignment: Record<string, number>;
  candidates: CandidateDoc[];
  parse_candidates: number[];
  marked_root: number | null;
  marked_edges: number[];
  violation: { assignment: Record<string, number>; edges: number[] } | null;
  decisions: number;
  revision: number;
}

export interface DecisionBody {
  revision: number;
  kind: "accept" | "iterate" | "parse" | "abandon";
  production?: string;
  edge?: number;
  parent?: number;
}

/** Everything one render pass needs, pinned to a single revision. */
export interface Snapshot {
  system: string;
  revision: number;
  graph: GraphDoc;
  forest: ForestDoc;
  session: SessionDoc | null;
}

export function edgeName(e: EdgeDoc): string {
  return e.name ?? `e${e.id}`;
}

export function nodeName(n: NodeDoc): string {
  return n.name ?? `n${n.id}`;
}
