/** Render-graph to SVG string: boxes with kind badges and member lists,
 * arrowheads by relation kind, multiplicity labels near the endpoints.
 * Pure string construction, so it runs (and is tested) outside a DOM. */

import { edgeAnchors, layoutGraph, BOX_HEADER, MEMBER_LINE, LANE_TOP } from "./layout.js";
import type { RenderEdge, RenderGraph } from "./types.js";

const KIND_BADGES: Record<string, string> = {
  abstract_class: "abstract",
  interface: "interface",
  enum: "enum",
};

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const MARKER_DEFS = `
  <defs>
    <marker id="arrow-open" markerWidth="12" markerHeight="10" refX="11" refY="5" orient="auto">
      <path d="M1,1 L11,5 L1,9" fill="none" stroke="#444" stroke-width="1.5"/>
    </marker>
    <marker id="arrow-triangle" markerWidth="14" markerHeight="12" refX="13" refY="6" orient="auto">
      <path d="M1,1 L13,6 L1,11 Z" fill="white" stroke="#444" stroke-width="1.2"/>
    </marker>
    <marker id="diamond-hollow" markerWidth="18" markerHeight="10" refX="1" refY="5" orient="auto">
      <path d="M1,5 L9,1 L17,5 L9,9 Z" fill="white" stroke="#444" stroke-width="1.2"/>
    </marker>
    <marker id="diamond-filled" markerWidth="18" markerHeight="10" refX="1" refY="5" orient="auto">
      <path d="M1,5 L9,1 L17,5 L9,9 Z" fill="#444" stroke="#444" stroke-width="1.2"/>
    </marker>
  </defs>`;

function edgeAttributes(edge: RenderEdge): string {
  switch (edge.kind) {
    case "generalization":
      return 'marker-end="url(#arrow-triangle)"';
    case "realization":
      return 'marker-end="url(#arrow-triangle)" stroke-dasharray="6 4"';
    case "aggregation":
      // source is the whole: diamond sits at the source end
      return 'marker-start="url(#diamond-hollow)"';
    case "composition":
      return 'marker-start="url(#diamond-filled)"';
    default:
      return 'marker-end="url(#arrow-open)"';
  }
}

/** SVG for a non-empty render graph; null signals "fall back to raw text". */
export function renderGraphSvg(graph: RenderGraph): string | null {
  if (graph.nodes.length === 0) return null;
  const layout = layoutGraph(graph);
  const parts: string[] = [];

  for (const lane of layout.lanes) {
    parts.push(
      `<rect class="lane" x="${lane.x}" y="${LANE_TOP}" width="${lane.width}" ` +
        `height="${lane.height}" rx="6"/>`,
      `<text class="lane-name" x="${lane.x + 8}" y="${LANE_TOP - 8}">` +
        `${escapeXml(lane.name)}</text>`,
    );
  }

  for (const edge of graph.edges) {
    const a = layout.boxes.get(edge.source);
    const b = layout.boxes.get(edge.target);
    if (!a || !b) continue;
    const { x1, y1, x2, y2 } = edgeAnchors(a, b);
    parts.push(
      `<line class="edge edge-${edge.kind}" x1="${x1}" y1="${y1}" ` +
        `x2="${x2}" y2="${y2}" stroke="#444" ${edgeAttributes(edge)}/>`,
    );
    const midX = (x1 + x2) / 2;
    const midY = (y1 + y2) / 2;
    if (edge.label) {
      parts.push(
        `<text class="edge-label" x="${midX}" y="${midY - 4}">` +
          `${escapeXml(edge.label)}</text>`,
      );
    }
    if (edge.source_mult) {
      parts.push(
        `<text class="mult" x="${x1 + (x2 - x1) * 0.15}" ` +
          `y="${y1 + (y2 - y1) * 0.15 - 4}">${escapeXml(edge.source_mult)}</text>`,
      );
    }
    if (edge.target_mult) {
      parts.push(
        `<text class="mult" x="${x1 + (x2 - x1) * 0.85}" ` +
          `y="${y1 + (y2 - y1) * 0.85 - 4}">${escapeXml(edge.target_mult)}</text>`,
      );
    }
  }

  for (const box of layout.boxes.values()) {
    const badge = KIND_BADGES[box.node.kind];
    parts.push(
      `<g class="node node-${box.node.kind}">`,
      `<rect class="node-box" x="${box.x}" y="${box.y}" width="${box.width}" ` +
        `height="${box.height}" rx="4"/>`,
      `<line x1="${box.x}" y1="${box.y + BOX_HEADER}" x2="${box.x + box.width}" ` +
        `y2="${box.y + BOX_HEADER}" stroke="#999"/>`,
    );
    if (badge) {
      parts.push(
        `<text class="kind-badge" x="${box.x + box.width / 2}" y="${box.y + 10}" ` +
          `text-anchor="middle">&#171;${badge}&#187;</text>`,
      );
    }
    parts.push(
      `<text class="node-name" x="${box.x + box.width / 2}" ` +
        `y="${box.y + BOX_HEADER - 7}" text-anchor="middle">` +
        `${escapeXml(box.node.label)}</text>`,
    );
    box.node.members.forEach((member, i) => {
      parts.push(
        `<text class="member" x="${box.x + 8}" ` +
          `y="${box.y + BOX_HEADER + (i + 1) * MEMBER_LINE - 3}">` +
          `${escapeXml(member)}</text>`,
      );
    });
    parts.push("</g>");
  }

  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${layout.width} ` +
    `${layout.height}" width="${layout.width}" height="${layout.height}">` +
    `${MARKER_DEFS}\n${parts.join("\n")}\n</svg>`
  );
}
