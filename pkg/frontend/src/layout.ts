import type { GraphEdge, GraphNode } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

/** mulberry32: tiny seeded PRNG so layouts are reproducible. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const ITERATIONS = 150;
const REPULSION = 6000;
const SPRING = 0.02;
const SPRING_LENGTH = 120;
const CENTERING = 0.01;

/** Deterministic force-directed layout: seeded start, fixed iteration count,
 * positions rounded so identical graphs always render identically. */
export function layoutGraph(
  nodes: GraphNode[],
  edges: GraphEdge[],
  width = 460,
  height = 320,
  seed = 42,
): Map<string, Point> {
  const rand = mulberry32(seed);
  const positions = new Map<string, Point>();
  for (const node of nodes) {
    positions.set(node.key, {
      x: width * (0.15 + 0.7 * rand()),
      y: height * (0.15 + 0.7 * rand()),
    });
  }
  const keys = nodes.map((n) => n.key);
  for (let iteration = 0; iteration < ITERATIONS; iteration++) {
    const forces = new Map<string, Point>(keys.map((k) => [k, { x: 0, y: 0 }]));
    for (let i = 0; i < keys.length; i++) {
      for (let j = i + 1; j < keys.length; j++) {
        const a = positions.get(keys[i])!;
        const b = positions.get(keys[j])!;
        const dx = a.x - b.x;
        const dy = a.y - b.y;
        const distSq = Math.max(dx * dx + dy * dy, 1);
        const push = REPULSION / distSq;
        const dist = Math.sqrt(distSq);
        const fx = (dx / dist) * push;
        const fy = (dy / dist) * push;
        const fa = forces.get(keys[i])!;
        const fb = forces.get(keys[j])!;
        fa.x += fx;
        fa.y += fy;
        fb.x -= fx;
        fb.y -= fy;
      }
    }
    for (const edge of edges) {
      const a = positions.get(edge.source);
      const b = positions.get(edge.target);
      if (!a || !b) continue;
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const dist = Math.max(Math.sqrt(dx * dx + dy * dy), 1);
      const pull = SPRING * (dist - SPRING_LENGTH);
      const fa = forces.get(edge.source)!;
      const fb = forces.get(edge.target)!;
      fa.x += (dx / dist) * pull;
      fa.y += (dy / dist) * pull;
      fb.x -= (dx / dist) * pull;
      fb.y -= (dy / dist) * pull;
    }
    for (const key of keys) {
      const p = positions.get(key)!;
      const f = forces.get(key)!;
      f.x += (width / 2 - p.x) * CENTERING;
      f.y += (height / 2 - p.y) * CENTERING;
      p.x = Math.min(width - 20, Math.max(20, p.x + f.x * 0.05));
      p.y = Math.min(height - 20, Math.max(20, p.y + f.y * 0.05));
    }
  }
  for (const p of positions.values()) {
    p.x = Math.round(p.x * 100) / 100;
    p.y = Math.round(p.y * 100) / 100;
  }
  return positions;
}
