/** Deterministic auto-layout: packages become vertical lanes, classifiers
 * stack inside their lane ordered by inheritance depth (parents first).
 * Structural faithfulness over aesthetics. */

import type { RenderGraph, RenderNode } from "./types.js";

export const BOX_HEADER = 26;
export const MEMBER_LINE = 16;
export const BOX_PAD_X = 10;
export const LANE_GAP = 40;
export const BOX_GAP = 28;
export const LANE_PAD = 16;
export const LANE_TOP = 34;
const CHAR_WIDTH = 7.2;
const MIN_BOX_WIDTH = 120;

export interface LayoutBox {
  id: string;
  x: number;
  y: number;
  width: number;
  height: number;
  node: RenderNode;
}

export interface LayoutLane {
  name: string;
  x: number;
  width: number;
  height: number;
}

export interface Layout {
  boxes: Map<string, LayoutBox>;
  lanes: LayoutLane[];
  width: number;
  height: number;
}

export function boxSize(node: RenderNode): { width: number; height: number } {
  const textLines = [node.label, ...node.members];
  const longest = textLines.reduce((m, l) => Math.max(m, l.length), 0);
  const width = Math.max(MIN_BOX_WIDTH, Math.ceil(longest * CHAR_WIDTH) + 2 * BOX_PAD_X);
  const height = BOX_HEADER + node.members.length * MEMBER_LINE + 8;
  return { width, height };
}

/** Longest generalization/realization chain from the node up to a root;
 * cycle-safe (a revisit contributes no further depth). */
export function inheritanceDepth(graph: RenderGraph): Map<string, number> {
  const parents = new Map<string, string[]>();
  for (const edge of graph.edges) {
    if (edge.kind === "generalization" || edge.kind === "realization") {
      const list = parents.get(edge.source) ?? [];
      list.push(edge.target);
      parents.set(edge.source, list);
    }
  }
  const depths = new Map<string, number>();
  const visiting = new Set<string>();

  const depthOf = (id: string): number => {
    const memo = depths.get(id);
    if (memo !== undefined) return memo;
    if (visiting.has(id)) return 0;
    visiting.add(id);
    const ps = parents.get(id) ?? [];
    const d = ps.length === 0 ? 0 : 1 + Math.max(...ps.map(depthOf));
    visiting.delete(id);
    depths.set(id, d);
    return d;
  };
  for (const node of graph.nodes) depthOf(node.id);
  return depths;
}

const ROOT_LANE = "(top level)";

export function layoutGraph(graph: RenderGraph): Layout {
  const depths = inheritanceDepth(graph);
  const byLane = new Map<string, RenderNode[]>();
  for (const node of graph.nodes) {
    const lane = node.package ?? ROOT_LANE;
    const list = byLane.get(lane) ?? [];
    list.push(node);
    byLane.set(lane, list);
  }
  const laneNames = [...byLane.keys()].sort((a, b) =>
    a === ROOT_LANE ? 1 : b === ROOT_LANE ? -1 : a.localeCompare(b),
  );

  const boxes = new Map<string, LayoutBox>();
  const lanes: LayoutLane[] = [];
  let x = LANE_GAP / 2;
  let maxHeight = 0;
  for (const laneName of laneNames) {
    const nodes = (byLane.get(laneName) ?? []).slice().sort((a, b) => {
      const da = depths.get(a.id) ?? 0;
      const db = depths.get(b.id) ?? 0;
      return da !== db ? da - db : a.id.localeCompare(b.id);
    });
    let y = LANE_TOP + LANE_PAD;
    let laneWidth = Math.max(MIN_BOX_WIDTH, laneName.length * CHAR_WIDTH + 20);
    for (const node of nodes) {
      const { width, height } = boxSize(node);
      boxes.set(node.id, { id: node.id, x: x + LANE_PAD, y, width, height, node });
      laneWidth = Math.max(laneWidth, width + 2 * LANE_PAD);
      y += height + BOX_GAP;
    }
    const laneHeight = y - BOX_GAP + LANE_PAD - LANE_TOP;
    lanes.push({ name: laneName, x, width: laneWidth, height: Math.max(laneHeight, 60) });
    for (const node of nodes) {
      // center boxes horizontally within their lane
      const box = boxes.get(node.id);
      if (box) box.x = x + (laneWidth - box.width) / 2;
    }
    maxHeight = Math.max(maxHeight, LANE_TOP + lanes[lanes.length - 1]!.height);
    x += laneWidth + LANE_GAP;
  }
  return { boxes, lanes, width: x, height: maxHeight + LANE_GAP };
}

export interface EdgeAnchor {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

/** Straight segment between box border points along the center line. */
export function edgeAnchors(a: LayoutBox, b: LayoutBox): EdgeAnchor {
  const cxA = a.x + a.width / 2;
  const cyA = a.y + a.height / 2;
  const cxB = b.x + b.width / 2;
  const cyB = b.y + b.height / 2;
  const clip = (box: LayoutBox, fromX: number, fromY: number, toX: number, toY: number) => {
    const dx = toX - fromX;
    const dy = toY - fromY;
    const scaleX = dx !== 0 ? box.width / 2 / Math.abs(dx) : Infinity;
    const scaleY = dy !== 0 ? box.height / 2 / Math.abs(dy) : Infinity;
    const t = Math.min(scaleX, scaleY, 1);
    return { x: fromX + dx * t, y: fromY + dy * t };
  };
  const p1 = clip(a, cxA, cyA, cxB, cyB);
  const p2 = clip(b, cxB, cyB, cxA, cyA);
  return { x1: p1.x, y1: p1.y, x2: p2.x, y2: p2.y };
}
