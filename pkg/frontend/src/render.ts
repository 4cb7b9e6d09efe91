/** SVG rendering of one snapshot: the hypergraph (circles for nodes, boxes
 * for edges, doubled border for replaceable ones, arrowhead on the first
 * tentacle) and the tracking forest with its decorated labels.
 *
 * Highlight classes: `violating` for edges named by the invariant's failure
 * witness, `marked` for the region under the marked subtree, `synthetic`
 * and `tombstone` for surgery bookkeeping vertices.
 */
import { layoutForest, layoutGraph } from "./layout.js";
import type { Snapshot } from "./model.js";
import { edgeName, nodeName } from "./model.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends string>(doc: Document, tag: K, attrs: Record<string, string | number> = {},
                              text?: string): SVGElement {
  const node = doc.createElementNS(SVG_NS, tag) as SVGElement;
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderGraph(doc: Document, snapshot: Snapshot): SVGElement {
  const layout = layoutGraph(snapshot.graph);
  const svg = el(doc, "svg", {
    class: "graph-view",
    viewBox: `0 0 ${layout.width} ${layout.height}`,
    "data-revision": snapshot.revision,
  });
  const violating = new Set(snapshot.session?.violation?.edges ?? []);
  const marked = new Set(snapshot.session?.marked_edges ?? []);

  for (const edge of snapshot.graph.edges) {
    const box = layout.edges.get(edge.id)!;
    for (const [k, n] of edge.nodes.entries()) {
      const circle = layout.nodes.get(n);
      if (!circle) continue;
      const line = el(doc, "line", {
        x1: box.x, y1: box.y, x2: circle.x, y2: circle.y,
        class: k === 0 ? "tentacle first" : "tentacle",
        "marker-end": k === 0 ? "url(#arrow)" : "",
      });
      svg.appendChild(line);
      if (k > 0) {
        svg.appendChild(el(doc, "text", {
          x: (box.x + circle.x) / 2, y: (box.y + circle.y) / 2 - 3,
          class: "tentacle-index",
        }, String(k + 1)));
      }
    }
  }

  const defs = el(doc, "defs");
  const marker = el(doc, "marker", {
    id: "arrow", viewBox: "0 0 10 10", refX: 10, refY: 5,
    markerWidth: 7, markerHeight: 7, orient: "auto-start-reverse",
  });
  marker.appendChild(el(doc, "path", { d: "M 0 0 L 10 5 L 0 10 z" }));
  defs.appendChild(marker);
  svg.insertBefore(defs, svg.firstChild);

  for (const node of snapshot.graph.nodes) {
    const p = layout.nodes.get(node.id)!;
    const g = el(doc, "g", { class: "node", "data-node": node.id });
    g.appendChild(el(doc, "circle", { cx: p.x, cy: p.y, r: 9 }));
    g.appendChild(el(doc, "text", { x: p.x, y: p.y - 13, class: "node-label" },
                     `${nodeName(node)}:${node.tau}`));
    svg.appendChild(g);
  }

  for (const edge of snapshot.graph.edges) {
    const p = layout.edges.get(edge.id)!;
    const classes = ["edge"];
    if (edge.theta === 1) classes.push("replaceable");
    if (violating.has(edge.id)) classes.push("violating");
    if (marked.has(edge.id)) classes.push("marked");
    const g = el(doc, "g", { class: classes.join(" "), "data-edge": edge.id });
    const label = `${edgeName(edge)}:${edge.tau}`;
    const w = Math.max(44, label.length * 7 + 10);
    g.appendChild(el(doc, "rect", { x: p.x - w / 2, y: p.y - 13, width: w, height: 26 }));
    if (edge.theta === 1) {
      g.appendChild(el(doc, "rect", {
        x: p.x - w / 2 + 3, y: p.y - 10, width: w - 6, height: 20, class: "inner-border",
      }));
    }
    g.appendChild(el(doc, "text", { x: p.x, y: p.y + 4, class: "edge-label" }, label));
    svg.appendChild(g);
  }
  return svg;
}

export function renderForest(doc: Document, snapshot: Snapshot): SVGElement {
  const layout = layoutForest(snapshot.forest);
  const svg = el(doc, "svg", {
    class: "forest-view",
    viewBox: `0 0 ${layout.width} ${layout.height}`,
    "data-revision": snapshot.revision,
  });
  const markedRoot = snapshot.session?.marked_root ?? null;
  const markedVertices = new Set<number>();
  if (markedRoot !== null) {
    const children = new Map(snapshot.forest.vertices.map((v) => [v.id, v.children]));
    const collect = (v: number) => {
      markedVertices.add(v);
      for (const c of children.get(v) ?? []) collect(c);
    };
    collect(markedRoot);
  }

  const byId = new Map(snapshot.forest.vertices.map((v) => [v.id, v]));
  for (const v of snapshot.forest.vertices) {
    const from = layout.vertices.get(v.id);
    if (!from) continue;
    for (const c of v.children) {
      const to = layout.vertices.get(c);
      if (to) svg.appendChild(el(doc, "line", {
        x1: from.x, y1: from.y, x2: to.x, y2: to.y, class: "branch",
      }));
    }
  }
  for (const v of snapshot.forest.vertices) {
    const p = layout.vertices.get(v.id);
    if (!p) continue;
    const classes = ["vertex"];
    if (v.tombstone) classes.push("tombstone");
    if (v.synthetic) classes.push("synthetic");
    if (markedVertices.has(v.id)) classes.push("marked");
    if (byId.get(v.id)?.leaf) classes.push("leaf");
    const g = el(doc, "g", { class: classes.join(" "), "data-vertex": v.id });
    const w = Math.max(60, v.label.length * 6.6 + 12);
    g.appendChild(el(doc, "rect", { x: p.x - w / 2, y: p.y - 12, width: w, height: 24, rx: 4 }));
    g.appendChild(el(doc, "text", { x: p.x, y: p.y + 4, class: "vertex-label" }, v.label));
    svg.appendChild(g);
  }
  return svg;
}
