/** One projection row: interlinked scatterplots with flows and overlays. */

import { BAND_COLORS, CERTAINTY_BAR_WIDTH, flowOpacity, flowThickness, inferno } from "../scales.js";
import { ViewState } from "../state.js";
import {
  BundleBlock,
  LayerBlock,
  MetricEntry,
  NeighborsDoc,
  ProjectionBlock,
  Segment,
  SessionData,
} from "../types.js";
import { VNode, fmt, h } from "../vdom.js";

const POINT_RADIUS = 3;
const BRUSHED_RADIUS = 4.5;
const LABEL_HEIGHT = 14;

export function clamp01(t: number): number {
  return Math.min(1, Math.max(0, t));
}

/** Normalized position of a value inside its documented metric range. */
export function metricT(entry: MetricEntry, index: number): number {
  const value = entry.values[index];
  const lo = entry.lo ? entry.lo[index] : (entry.range ?? [-1, 1])[0];
  const hi = entry.hi ? entry.hi[index] : (entry.range ?? [-1, 1])[1];
  return hi > lo ? clamp01((value - lo) / (hi - lo)) : 0.5;
}

export function bundleT(entry: MetricEntry, value: number): number {
  const [lo, hi] = entry.range ?? [-1, 1];
  return hi > lo ? clamp01((value - lo) / (hi - lo)) : 0.5;
}

function metricEntry(
  data: SessionData,
  projIdx: number,
  layerIdx: number,
  metric: string,
): MetricEntry {
  return data.metrics.projections[projIdx].layers[layerIdx].metrics[metric];
}

/** Fill color per point: session feature colors, or the toggled metric. */
export function pointColors(
  state: ViewState,
  data: SessionData,
  projIdx: number,
  layerIdx: number,
): string[] {
  const layout = data.layout;
  const n = layout.ids.length;
  if (state.metricColoring !== null) {
    const entry = metricEntry(data, projIdx, layerIdx, state.metricColoring);
    return Array.from({ length: n }, (_, i) => inferno(metricT(entry, i)));
  }
  if (layout.colors.mode === "feature") {
    const byLabel = new Map(layout.colors.legend.map((e) => [e.label, e.color]));
    return layout.colors.values.map((v) => byLabel.get(v) ?? "#888888");
  }
  const by = layout.colors.by;
  const entry = metricEntry(data, projIdx, layerIdx, by);
  return Array.from({ length: n }, (_, i) => inferno(metricT(entry, i)));
}

function segmentPath(segments: Segment[], height: number): string {
  const flipY = (y: number) => height - y;
  const parts: string[] = [];
  for (let i = 0; i < segments.length; i += 1) {
    const seg = segments[i];
    if (i % 4 === 0) {
      parts.push(`M${fmt(seg.from[0])},${fmt(flipY(seg.from[1]))}`);
    }
    if (seg.kind === "h") {
      parts.push(`L${fmt(seg.to[0])},${fmt(flipY(seg.to[1]))}`);
    } else {
      const ctrl = seg.ctrl as [number, number];
      parts.push(
        `Q${fmt(ctrl[0])},${fmt(flipY(ctrl[1]))} ${fmt(seg.to[0])},${fmt(flipY(seg.to[1]))}`,
      );
    }
  }
  return parts.join("");
}

function bundleColor(
  state: ViewState,
  data: SessionData,
  projIdx: number,
  layerIdx: number,
  bundle: BundleBlock,
): string {
  const metric = state.metricColoring ?? (data.layout.colors.mode === "metric" ? data.layout.colors.by : null);
  if (metric !== null) {
    const entry = metricEntry(data, projIdx, layerIdx, metric);
    return inferno(bundleT(entry, bundle.metric_means[metric]));
  }
  const colors = data.layout.colors;
  if (colors.mode === "feature") {
    const hit = colors.legend.find((e) => e.label === bundle.property);
    if (hit) {
      return hit.color;
    }
  }
  return "#999999";
}

function renderFlows(
  state: ViewState,
  data: SessionData,
  projIdx: number,
  projection: ProjectionBlock,
  brushSet: Set<number>,
): VNode[] {
  const out: VNode[] = [];
  projection.flows.forEach((flow, ti) => {
    flow.bundles.forEach((bundle, bi) => {
      const brushed = bundle.ids.some((id) => brushSet.has(id));
      out.push(
        h("path", {
          class: `flow${brushed ? " brushed" : ""}`,
          d: segmentPath(bundle.segments, projection.height),
          fill: "none",
          stroke: bundleColor(state, data, projIdx, ti, bundle),
          "stroke-width": flowThickness(bundle.size),
          "stroke-opacity": flowOpacity(bundle.size),
          "data-transition": ti,
          "data-bundle": bi,
          "data-size": bundle.size,
          "data-ids": bundle.ids.join(","),
        }),
      );
    });
  });
  return out;
}

function renderHulls(layer: LayerBlock, which: "2d" | "hd", height: number): VNode[] {
  const hulls = which === "2d" ? layer.hulls_2d : layer.hulls_hd;
  return hulls.map((hull) =>
    h("polygon", {
      class: `hull hull-${which}`,
      points: hull.vertices.map(([x, y]) => `${fmt(x)},${fmt(height - y)}`).join(" "),
      fill: which === "2d" ? hull.color : "none",
      "fill-opacity": which === "2d" ? 0.08 : null,
      stroke: hull.color,
      "stroke-dasharray": which === "hd" ? "4 3" : null,
      "data-space": which,
      "data-cluster": hull.cluster,
    }),
  );
}

function renderKnnLines(
  layer: LayerBlock,
  layerIdx: number,
  neighbors: NeighborsDoc,
  idToIndex: Map<number, number>,
  height: number,
): VNode[] {
  const lines: VNode[] = [];
  const rows = neighbors.layers[layerIdx];
  rows.forEach((row, i) => {
    const [x1, y1] = layer.points[i];
    for (const nb of row) {
      const j = idToIndex.get(nb);
      if (j === undefined) {
        continue;
      }
      const [x2, y2] = layer.points[j];
      lines.push(
        h("line", {
          class: "knn",
          x1: fmt(x1),
          y1: fmt(height - y1),
          x2: fmt(x2),
          y2: fmt(height - y2),
          "data-from": neighbors.ids[i],
          "data-to": nb,
        }),
      );
    }
  });
  return lines;
}

function renderSummaryLabels(
  state: ViewState,
  layer: LayerBlock,
  height: number,
): VNode[] {
  const feature = state.summaryFeature;
  if (feature === null) {
    return [];
  }
  const entries = layer.summaries_2d[feature] ?? [];
  const out: VNode[] = [];
  entries.forEach((entry) => {
    // anchor the label at the hull's top edge
    const hull = layer.hulls_2d.find((hl) => hl.cluster === entry.cluster);
    if (!hull) {
      return;
    }
    const topY = Math.max(...hull.vertices.map(([, y]) => y));
    const leftX = Math.min(...hull.vertices.map(([x]) => x));
    const y = height - topY - 6;
    out.push(
      h(
        "g",
        { class: "summary", "data-cluster": entry.cluster, "data-feature": feature },
        h(
          "text",
          { class: "summary-label", x: fmt(leftX), y: fmt(y - 4) },
          `${entry.label}`,
        ),
        h("rect", {
          class: "certainty-bar",
          x: fmt(leftX),
          y: fmt(y),
          width: fmt(entry.certainty * CERTAINTY_BAR_WIDTH),
          height: 4,
          fill: BAND_COLORS[entry.band],
          "data-certainty": entry.certainty,
          "data-band": entry.band,
        }),
        h("rect", {
          class: "certainty-frame",
          x: fmt(leftX),
          y: fmt(y),
          width: CERTAINTY_BAR_WIDTH,
          height: 4,
        }),
      ),
    );
  });
  return out;
}

export function renderProjectionRow(
  state: ViewState,
  data: SessionData,
  projIdx: number,
): VNode {
  const projection = data.layout.projections[projIdx];
  const layout = data.layout;
  const brushSet = new Set(state.brush);
  const idToIndex = new Map(layout.ids.map((id, i) => [id, i]));
  const lastFrame = projection.layers[projection.layers.length - 1].frame;
  const width = lastFrame.x_right;
  const height = projection.height;
  const rowHeight = height + LABEL_HEIGHT;

  const children: (VNode | string)[] = [];
  children.push(...renderFlows(state, data, projIdx, projection, brushSet));
  projection.layers.forEach((layer, layerIdx) => {
    const colors = pointColors(state, data, projIdx, layerIdx);
    const layerChildren: (VNode | string)[] = [];
    layerChildren.push(
      h("rect", {
        class: "frame",
        x: fmt(layer.frame.x_left),
        y: 0,
        width: fmt(layer.frame.width),
        height: fmt(height),
        "data-layer": layer.layer,
      }),
      h(
        "text",
        { class: "layer-title", x: fmt(layer.frame.x_left + 4), y: fmt(height + LABEL_HEIGHT - 3) },
        `layer ${layer.layer}`,
      ),
    );
    if (state.hullsHd) {
      layerChildren.push(...renderHulls(layer, "hd", height));
    }
    if (state.hulls2d) {
      layerChildren.push(...renderHulls(layer, "2d", height));
    }
    if (state.knn.enabled && data.neighbors) {
      layerChildren.push(...renderKnnLines(layer, layerIdx, data.neighbors, idToIndex, height));
    }
    layer.points.forEach(([x, y], i) => {
      const id = layout.ids[i];
      const brushed = brushSet.has(id);
      layerChildren.push(
        h("circle", {
          class: `point${brushed ? " brushed" : ""}`,
          cx: fmt(x),
          cy: fmt(height - y),
          r: brushed ? BRUSHED_RADIUS : POINT_RADIUS,
          fill: colors[i],
          "data-id": id,
          "data-token": layout.tokens[i],
        }),
      );
    });
    layerChildren.push(...renderSummaryLabels(state, layer, height));
    children.push(h("g", { class: "layer", "data-layer": layer.layer }, ...layerChildren));
  });

  return h(
    "svg",
    {
      class: `projection-row${state.brush.length ? " has-brush" : ""}`,
      "data-projection": projIdx,
      "data-method": projection.method,
      viewBox: `0 0 ${fmt(width)} ${fmt(rowHeight)}`,
      width: fmt(width),
      height: fmt(rowHeight),
      xmlns: "http://www.w3.org/2000/svg",
    },
    h("title", {}, `${projection.method}`),
    ...children,
  );
}
