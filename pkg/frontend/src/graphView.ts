import { layoutGraph } from "./layout.js";
import { edgeColor, nodeColors } from "./theme.js";
import type { QueryGraph } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 460;
const HEIGHT = 320;
const RADIUS = 14;

/** SVG rendering of the query graph: blue verified entities, orange
 * unresolved variables, labeled property edges. */
export function renderQueryGraph(graph: QueryGraph | null): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "query-graph");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("width", String(WIDTH));
  svg.setAttribute("height", String(HEIGHT));
  if (!graph || graph.nodes.length === 0) {
    return svg;
  }
  const positions = layoutGraph(graph.nodes, graph.edges, WIDTH, HEIGHT);

  for (const edge of graph.edges) {
    const from = positions.get(edge.source);
    const to = positions.get(edge.target);
    if (!from || !to) continue;
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(from.x));
    line.setAttribute("y1", String(from.y));
    line.setAttribute("x2", String(to.x));
    line.setAttribute("y2", String(to.y));
    line.setAttribute("stroke", edgeColor);
    line.setAttribute("class", "graph-edge");
    svg.appendChild(line);

    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String((from.x + to.x) / 2));
    label.setAttribute("y", String((from.y + to.y) / 2 - 4));
    label.setAttribute("class", "graph-edge-label");
    label.setAttribute("text-anchor", "middle");
    label.textContent = edge.displayLabel;
    svg.appendChild(label);
  }

  for (const node of graph.nodes) {
    const position = positions.get(node.key);
    if (!position) continue;
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(position.x));
    circle.setAttribute("cy", String(position.y));
    circle.setAttribute("r", String(RADIUS));
    circle.setAttribute("fill", nodeColors[node.kind] ?? nodeColors.literal);
    circle.setAttribute("class", `graph-node graph-node-${node.kind}`);
    circle.setAttribute("data-kind", node.kind);
    svg.appendChild(circle);

    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(position.x));
    label.setAttribute("y", String(position.y + RADIUS + 12));
    label.setAttribute("text-anchor", "middle");
    label.setAttribute("class", "graph-node-label");
    label.textContent = node.displayLabel;
    svg.appendChild(label);
  }
  return svg;
}
