/** Force-directed node placement, honoring layout hints when present.
 * Purely cosmetic: deterministic given the same inputs, excluded from tests. */

import type { NodeDoc } from "./types";

export interface Point {
  x: number;
  y: number;
}

export type Layout = Map<string, Point>;

const ITERATIONS = 180;
const SPRING = 0.02;
const SPRING_LENGTH = 140;
const REPULSION = 9000;
const STEP = 0.85;

/** Deterministic pseudo-random scatter for unhinted nodes. */
function seedPoint(name: string, index: number, total: number): Point {
  let hash = 2166136261;
  for (const ch of name) hash = (hash ^ ch.charCodeAt(0)) * 16777619;
  const angle = (2 * Math.PI * index) / Math.max(total, 1) + (hash % 97) / 97;
  return { x: 260 + 150 * Math.cos(angle), y: 220 + 150 * Math.sin(angle) };
}

export function computeLayout(
  nodes: (NodeDoc | { name: string })[],
  edges: { from: string; to: string }[],
  width = 520,
  height = 440,
): Layout {
  const points: Layout = new Map();
  const pinned = new Set<string>();
  nodes.forEach((n, i) => {
    const hint = "pos" in n ? n.pos : undefined;
    if (hint) {
      points.set(n.name, { x: 80 + hint[0] * 90, y: height - 80 - hint[1] * 90 });
      pinned.add(n.name);
    } else {
      points.set(n.name, seedPoint(n.name, i, nodes.length));
    }
  });
  const names = nodes.map(n => n.name);
  for (let iter = 0; iter < ITERATIONS; iter++) {
    const force = new Map<string, Point>(names.map(n => [n, { x: 0, y: 0 }]));
    for (let i = 0; i < names.length; i++) {
      for (let j = i + 1; j < names.length; j++) {
        const a = points.get(names[i])!;
        const b = points.get(names[j])!;
        const dx = a.x - b.x;
        const dy = a.y - b.y;
        const d2 = Math.max(dx * dx + dy * dy, 1);
        const push = REPULSION / d2;
        const d = Math.sqrt(d2);
        force.get(names[i])!.x += (dx / d) * push;
        force.get(names[i])!.y += (dy / d) * push;
        force.get(names[j])!.x -= (dx / d) * push;
        force.get(names[j])!.y -= (dy / d) * push;
      }
    }
    for (const e of edges) {
      const a = points.get(e.from);
      const b = points.get(e.to);
      if (!a || !b) continue;
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const d = Math.max(Math.sqrt(dx * dx + dy * dy), 1);
      const pull = SPRING * (d - SPRING_LENGTH);
      force.get(e.from)!.x += (dx / d) * pull;
      force.get(e.from)!.y += (dy / d) * pull;
      force.get(e.to)!.x -= (dx / d) * pull;
      force.get(e.to)!.y -= (dy / d) * pull;
    }
    for (const name of names) {
      if (pinned.has(name)) continue;
      const p = points.get(name)!;
      const f = force.get(name)!;
      p.x = Math.min(width - 40, Math.max(40, p.x + STEP * f.x));
      p.y = Math.min(height - 40, Math.max(40, p.y + STEP * f.y));
    }
  }
  return points;
}
