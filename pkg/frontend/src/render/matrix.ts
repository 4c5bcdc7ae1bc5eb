/** Distance matrices as canvas rasters (cell counts exceed SVG budgets).
 *
 * Rendering is split: this module computes a deterministic draw-command
 * list from the payload; the browser shell paints the commands onto the
 * <canvas>. Tests snapshot the command lists directly.
 */

import { viridis } from "../scales.js";
import { ViewState } from "../state.js";
import { MatrixSpaceBlock, SessionData } from "../types.js";
import { VNode, h } from "../vdom.js";

export interface DrawCmd {
  x: number;
  y: number;
  w: number;
  h: number;
  color: string;
}

export interface CanvasJob {
  key: string;
  width: number;
  height: number;
  commands: DrawCmd[];
}

const CELL_AREA = 160; // raster edge in px
const BAR = 6; // cluster color bar thickness

export function matrixDrawCommands(
  block: MatrixSpaceBlock,
  ordering: string,
  sizePx: number = CELL_AREA,
): DrawCmd[] {
  const order = block.orderings[ordering];
  const n = order.length;
  const cell = sizePx / n;
  let max = 0;
  for (const row of block.dist) {
    for (const v of row) {
      if (v > max) {
        max = v;
      }
    }
  }
  const commands: DrawCmd[] = [];
  for (let r = 0; r < n; r += 1) {
    for (let c = 0; c < n; c += 1) {
      const v = block.dist[order[r]][order[c]];
      commands.push({
        x: BAR + c * cell,
        y: BAR + r * cell,
        w: cell,
        h: cell,
        color: viridis(max > 0 ? v / max : 0),
      });
    }
  }
  // top bar: 2D cluster colors; left bar: HD cluster colors
  for (let c = 0; c < n; c += 1) {
    commands.push({ x: BAR + c * cell, y: 0, w: cell, h: BAR, color: block.col_colors[order[c]] });
  }
  for (let r = 0; r < n; r += 1) {
    commands.push({ x: 0, y: BAR + r * cell, w: BAR, h: cell, color: block.row_colors[order[r]] });
  }
  return commands;
}

export function renderMatrixStrip(
  state: ViewState,
  data: SessionData,
  projIdx: number,
): { node: VNode; jobs: CanvasJob[] } {
  const doc = data.matrices;
  const jobs: CanvasJob[] = [];
  if (!state.matrices.enabled || doc === null) {
    return { node: h("div", { class: "matrix-strip empty" }), jobs };
  }
  const { space, ordering } = state.matrices;
  const size = CELL_AREA + BAR;
  const cells: VNode[] = [];
  doc.projections[projIdx].layers.forEach((layer) => {
    const key = `m-${projIdx}-${layer.layer}-${space}-${ordering}`;
    jobs.push({
      key,
      width: size,
      height: size,
      commands: matrixDrawCommands(layer.spaces[space], ordering, CELL_AREA),
    });
    cells.push(
      h(
        "figure",
        { class: "matrix-cell" },
        h("canvas", {
          class: "matrix",
          width: size,
          height: size,
          "data-key": key,
          "data-layer": layer.layer,
          "data-space": space,
          "data-ordering": ordering,
        }),
        h("figcaption", {}, `layer ${layer.layer} · ${space} · ${ordering}`),
      ),
    );
  });
  return {
    node: h("div", { class: "matrix-strip", "data-projection": projIdx }, ...cells),
    jobs,
  };
}
