import { describe, expect, it } from "vitest";

import { layoutForest, layoutGraph, seededRandom } from "../src/layout.js";
import { renderForest, renderGraph } from "../src/render.js";
import { violatedSnapshot } from "./fixtures.js";

describe("layout", () => {
  it("seeded generator is reproducible", () => {
    const a = seededRandom(42);
    const b = seededRandom(42);
    expect([a(), a(), a()]).toEqual([b(), b(), b()]);
  });

  it("graph layout is deterministic for a snapshot", () => {
    const g = violatedSnapshot().graph;
    const one = layoutGraph(g);
    const two = layoutGraph(g);
    for (const id of one.nodes.keys()) {
      expect(one.nodes.get(id)).toEqual(two.nodes.get(id));
    }
    for (const id of one.edges.keys()) {
      expect(one.edges.get(id)).toEqual(two.edges.get(id));
    }
  });

  it("forest layout centres parents over children", () => {
    const f = violatedSnapshot().forest;
    const layout = layoutForest(f);
    const parent = layout.vertices.get(30)!;
    const child = layout.vertices.get(32)!;
    expect(parent.x).toBeCloseTo(child.x);
    expect(child.y).toBeGreaterThan(parent.y);
  });
});

describe("graph rendering", () => {
  const snapshot = violatedSnapshot();
  const svg = renderGraph(document, snapshot);

  it("draws circles for nodes and boxes for edges", () => {
    expect(svg.querySelectorAll("g.node circle").length).toBe(2);
    expect(svg.querySelectorAll("g.edge rect").length).toBeGreaterThanOrEqual(2);
  });

  it("replaceable edges get the doubled border", () => {
    const failed = svg.querySelector('g[data-edge="20"]')!;
    expect(failed.querySelectorAll("rect").length).toBe(2); // outer + inner
    const client = svg.querySelector('g[data-edge="15"]')!;
    expect(client.querySelectorAll("rect").length).toBe(1);
  });

  it("first tentacle carries the arrowhead", () => {
    const arrowed = [...svg.querySelectorAll("line.tentacle.first")];
    expect(arrowed.length).toBe(2);
    expect(arrowed.every((l) => l.getAttribute("marker-end") === "url(#arrow)")).toBe(true);
  });

  it("highlights the marked failed edge and the violating client", () => {
    const failed = svg.querySelector('g[data-edge="20"]')!;
    expect(failed.getAttribute("class")).toContain("marked");
    const client = svg.querySelector('g[data-edge="15"]')!;
    expect(client.getAttribute("class")).toContain("violating");
    expect(client.getAttribute("class")).toContain("marked");
  });

  it("renders identically for the same snapshot", () => {
    const again = renderGraph(document, violatedSnapshot());
    expect(again.outerHTML).toBe(svg.outerHTML);
  });

  it("records the revision it was drawn from", () => {
    expect(svg.getAttribute("data-revision")).toBe("0");
  });
});

describe("the browsed-board payload", () => {
  // the two-step browsing trace: three current alternatives, five vertices
  const snapshot: ReturnType<typeof violatedSnapshot> = {
    system: "trip",
    revision: 2,
    graph: {
      nodes: [1, 2, 3, 4].map((id) => ({ id, tau: "b", name: `u${id}` })),
      edges: [
        { id: 11, tau: "Fl", nodes: [3, 2], theta: 1, name: "f1" },
        { id: 12, tau: "Fl", nodes: [4, 2], theta: 1, name: "f3" },
        { id: 13, tau: "Fl", nodes: [1, 2], theta: 1, name: "f4" },
      ],
    },
    forest: {
      roots: [50],
      vertices: [
        { id: 50, children: [51, 52], label: "[f(u1,u2), brF]", edge: 10, nodes: [1, 2],
          tau: "Fl", production: "brF", synthetic: false, tombstone: false, leaf: false },
        { id: 51, children: [], label: "[f1(u3,u2), ^]", edge: 11, nodes: [3, 2],
          tau: "Fl", production: null, synthetic: false, tombstone: false, leaf: true },
        { id: 52, children: [53, 54], label: "[f2(u1,u2), brF]", edge: 14, nodes: [1, 2],
          tau: "Fl", production: "brF", synthetic: false, tombstone: false, leaf: false },
        { id: 53, children: [], label: "[f3(u4,u2), ^]", edge: 12, nodes: [4, 2],
          tau: "Fl", production: null, synthetic: false, tombstone: false, leaf: true },
        { id: 54, children: [], label: "[f4(u1,u2), ^]", edge: 13, nodes: [1, 2],
          tau: "Fl", production: null, synthetic: false, tombstone: false, leaf: true },
      ],
    },
    session: null,
  };

  it("shows three flight boxes and the five decorated vertices", () => {
    const graph = renderGraph(document, snapshot);
    const labels = [...graph.querySelectorAll("text.edge-label")].map((t) => t.textContent);
    expect(labels.sort()).toEqual(["f1:Fl", "f3:Fl", "f4:Fl"]);
    const forest = renderForest(document, snapshot);
    expect(forest.querySelectorAll("g.vertex").length).toBe(5);
    const texts = [...forest.querySelectorAll("text.vertex-label")].map((t) => t.textContent);
    expect(texts).toContain("[f2(u1,u2), brF]");
    expect(texts).toContain("[f4(u1,u2), ^]");
  });

  it("renders the empty state without complaint", () => {
    const empty = { ...snapshot, graph: { nodes: [], edges: [] },
                    forest: { roots: [], vertices: [] } };
    expect(renderGraph(document, empty).querySelectorAll("g").length).toBe(0);
    expect(renderForest(document, empty).querySelectorAll("g").length).toBe(0);
  });
});

describe("forest rendering", () => {
  const snapshot = violatedSnapshot();
  const svg = renderForest(document, snapshot);

  it("one labelled box per vertex, branches between them", () => {
    expect(svg.querySelectorAll("g.vertex").length).toBe(3);
    expect(svg.querySelectorAll("line.branch").length).toBe(1);
    const labels = [...svg.querySelectorAll("text.vertex-label")].map((t) => t.textContent);
    expect(labels).toContain("[s(v,u), badServer]");
    expect(labels).toContain("[f1(v,u), ^]");
  });

  it("marks the subtree under marked_root", () => {
    const marked = violatedSnapshot();
    marked.session!.marked_root = 30;
    const out = renderForest(document, marked);
    expect(out.querySelector('g[data-vertex="30"]')!.getAttribute("class")).toContain("marked");
    expect(out.querySelector('g[data-vertex="32"]')!.getAttribute("class")).toContain("marked");
    expect(out.querySelector('g[data-vertex="31"]')!.getAttribute("class")).not.toContain("marked");
  });
});
