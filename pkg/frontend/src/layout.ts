/** Deterministic layouts: a small force simulation for the hypergraph (run
 * for a fixed number of steps from positions seeded by item ids, so a given
 * snapshot always renders identically) and a tidy layered layout for the
 * forest.
 *
 * The hypergraph is laid out bipartitely: edge boxes and node circles are
 * both bodies, with springs along the tentacles.
 */
import type { ForestDoc, GraphDoc } from "./model.js";

export interface Point {
  x: number;
  y: number;
}

export interface GraphLayout {
  nodes: Map<number, Point>;
  edges: Map<number, Point>;
  width: number;
  height: number;
}

/** Mulberry32: tiny seeded generator, deterministic across runs. */
export function seededRandom(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const STEPS = 160;
const SPRING = 0.06;
const SPRING_LENGTH = 70;
const REPULSION = 2600;

export function layoutGraph(graph: GraphDoc, width = 640, height = 420): GraphLayout {
  const bodies: { key: string; point: Point }[] = [];
  const index = new Map<string, Point>();
  const rand = seededRandom(1.0e9 + graph.nodes.length * 7919 + graph.edges.length * 104729);

  const place = (key: string, bias: number) => {
    const point = {
      x: width / 2 + (rand() - 0.5) * width * 0.6 + bias,
      y: height / 2 + (rand() - 0.5) * height * 0.6,
    };
    bodies.push({ key, point });
    index.set(key, point);
    return point;
  };

  for (const n of [...graph.nodes].sort((a, b) => a.id - b.id)) place(`n${n.id}`, 0);
  for (const e of [...graph.edges].sort((a, b) => a.id - b.id)) place(`e${e.id}`, 10);

  const springs: [Point, Point][] = [];
  for (const e of graph.edges) {
    const box = index.get(`e${e.id}`)!;
    for (const n of e.nodes) {
      const circle = index.get(`n${n}`);
      if (circle) springs.push([box, circle]);
    }
  }

  for (let step = 0; step < STEPS; step++) {
    const cooling = 1 - step / STEPS;
    for (let i = 0; i < bodies.length; i++) {
      for (let j = i + 1; j < bodies.length; j++) {
        const a = bodies[i].point;
        const b = bodies[j].point;
        const dx = a.x - b.x || 0.01;
        const dy = a.y - b.y || 0.01;
        const d2 = dx * dx + dy * dy;
        const force = (REPULSION / d2) * cooling;
        const d = Math.sqrt(d2);
        a.x += (dx / d) * force;
        a.y += (dy / d) * force;
        b.x -= (dx / d) * force;
        b.y -= (dy / d) * force;
      }
    }
    for (const [a, b] of springs) {
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const d = Math.sqrt(dx * dx + dy * dy) || 0.01;
      const pull = SPRING * (d - SPRING_LENGTH) * cooling;
      a.x += (dx / d) * pull;
      a.y += (dy / d) * pull;
      b.x -= (dx / d) * pull;
      b.y -= (dy / d) * pull;
    }
    for (const { point } of bodies) {
      point.x = Math.min(width - 40, Math.max(40, point.x));
      point.y = Math.min(height - 30, Math.max(30, point.y));
    }
  }

  const nodes = new Map<number, Point>();
  const edges = new Map<number, Point>();
  for (const n of graph.nodes) nodes.set(n.id, index.get(`n${n.id}`)!);
  for (const e of graph.edges) edges.set(e.id, index.get(`e${e.id}`)!);
  return { nodes, edges, width, height };
}

export interface ForestLayout {
  vertices: Map<number, Point>;
  width: number;
  height: number;
}

const LEVEL_HEIGHT = 64;
const LEAF_SPACING = 150;

/** Classic tidy layout: leaves get consecutive slots, parents centre over
 * their children; trees of the forest are laid out side by side. */
export function layoutForest(forest: ForestDoc, minWidth = 640): ForestLayout {
  const children = new Map<number, number[]>();
  for (const v of forest.vertices) children.set(v.id, v.children);
  const pos = new Map<number, Point>();
  let nextSlot = 0;
  let depthMax = 0;

  const walk = (v: number, depth: number): number => {
    depthMax = Math.max(depthMax, depth);
    const kids = children.get(v) ?? [];
    let x: number;
    if (kids.length === 0) {
      x = nextSlot++;
    } else {
      const xs = kids.map((c) => walk(c, depth + 1));
      x = (xs[0] + xs[xs.length - 1]) / 2;
    }
    pos.set(v, { x, y: depth });
    return x;
  };

  for (const r of forest.roots) {
    walk(r, 0);
    nextSlot += 0.5; // gap between trees
  }

  const width = Math.max(minWidth, (nextSlot + 0.5) * LEAF_SPACING);
  const height = (depthMax + 1) * LEVEL_HEIGHT + 40;
  const vertices = new Map<number, Point>();
  for (const [v, p] of pos) {
    vertices.set(v, { x: 40 + (p.x + 0.4) * LEAF_SPACING, y: 36 + p.y * LEVEL_HEIGHT });
  }
  return { vertices, width, height };
}
