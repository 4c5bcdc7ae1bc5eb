/** Assemble the full workspace document from payloads and view state. */

import { ViewState } from "../state.js";
import { DatasetInfo, SessionData } from "../types.js";
import { VNode, h } from "../vdom.js";
import { renderCloseReading } from "./closereading.js";
import { CanvasJob, renderMatrixStrip } from "./matrix.js";
import { renderProjectionRow } from "./scatter.js";
import { renderLeftSidebar, renderRightSidebar } from "./sidebar.js";

export interface RenderResult {
  tree: VNode;
  canvases: CanvasJob[];
}

export function renderWorkspace(
  state: ViewState,
  data: SessionData,
  datasets: DatasetInfo[] | null = null,
): RenderResult {
  const rowCount = state.dual ? data.layout.projections.length : 1;
  const rows: VNode[] = [];
  const canvases: CanvasJob[] = [];
  for (let projIdx = 0; projIdx < rowCount; projIdx += 1) {
    rows.push(
      h(
        "div",
        { class: "row-label" },
        `${data.layout.projections[projIdx].method}`,
      ),
      renderProjectionRow(state, data, projIdx),
    );
    const strip = renderMatrixStrip(state, data, projIdx);
    rows.push(strip.node);
    canvases.push(...strip.jobs);
  }
  const hovered = state.hover !== null ? data.contexts[String(state.hover)] : undefined;
  const tooltip = hovered
    ? h(
        "div",
        { class: "tooltip", "data-id": hovered.id },
        h("b", {}, hovered.token),
        ` — ${hovered.sentence}`,
      )
    : h("div", { class: "tooltip hidden" });
  const tree = h(
    "div",
    { class: "workspace", "data-session": data.layout.session },
    renderLeftSidebar(data, datasets),
    h(
      "main",
      { class: "main" },
      h("div", { class: "rows" }, ...rows),
      renderCloseReading(state, data.closereading),
    ),
    renderRightSidebar(state, data),
    tooltip,
  );
  return { tree, canvases };
}
