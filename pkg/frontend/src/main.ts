/** Browser shell: fetch payloads, mount the rendered tree, wire events.
 *
 * All geometry and numbers come from the rendered tree (pure function of
 * payloads + view state); this module only mounts markup, paints canvas
 * jobs, and translates DOM events into state transitions. Stale responses
 * are discarded by checking the active session id after each await.
 */

import { ApiClient } from "./api.js";
import { CanvasJob } from "./render/matrix.js";
import { renderWorkspace } from "./render/workspace.js";
import {
  ViewState,
  clearBrush,
  defaultState,
  patch,
  setBrush,
  setHover,
  toggleBrush,
} from "./state.js";
import { DatasetInfo, OccurrenceDoc, SessionData } from "./types.js";
import { serialize } from "./vdom.js";

const params = new URLSearchParams(window.location.search);
const API_BASE = params.get("api") ?? "http://127.0.0.1:8765";

const api = new ApiClient(API_BASE);
const root = document.getElementById("app") as HTMLElement;

let state: ViewState | null = null;
let data: SessionData | null = null;
let datasets: DatasetInfo[] = [];
const contextCache: Record<string, OccurrenceDoc> = {};

function paintCanvases(jobs: CanvasJob[]): void {
  for (const job of jobs) {
    const canvas = root.querySelector<HTMLCanvasElement>(`canvas[data-key="${job.key}"]`);
    const ctx = canvas?.getContext("2d");
    if (!canvas || !ctx) {
      continue;
    }
    ctx.clearRect(0, 0, job.width, job.height);
    for (const cmd of job.commands) {
      ctx.fillStyle = cmd.color;
      ctx.fillRect(cmd.x, cmd.y, cmd.w + 0.5, cmd.h + 0.5);
    }
  }
}

function render(): void {
  if (!state || !data) {
    return;
  }
  const result = renderWorkspace(state, data, datasets);
  root.innerHTML = serialize(result.tree);
  paintCanvases(result.canvases);
}

async function refetchOverlayData(): Promise<void> {
  if (!state || !data) {
    return;
  }
  const id = state.sessionId;
  if (state.knn.enabled && (!data.neighbors || data.neighbors.k !== state.knn.k)) {
    const neighbors = await api.neighbors(id, state.knn.k);
    if (state.sessionId === id) {
      data.neighbors = neighbors;
    }
  }
  if (state.matrices.enabled && !data.matrices) {
    const matrices = await api.matrices(id);
    if (state.sessionId === id) {
      data.matrices = matrices;
    }
  }
}

async function loadSession(config: Record<string, unknown>): Promise<void> {
  const created = await api.createSession(config);
  const id = created.id;
  const [layout, metrics, closereading] = await Promise.all([
    api.layout(id),
    api.metrics(id),
    api.closereading(id, 0).catch(() => null),
  ]);
  data = { layout, metrics, matrices: null, neighbors: null, closereading, contexts: contextCache };
  state = defaultState(id);
  const features = Object.keys(layout.projections[0].layers[0].summaries_2d);
  if (!features.includes("pos")) {
    state = patch(state, { summaryFeature: features[0] ?? null });
  }
  render();
}

function svgPoint(svg: SVGSVGElement, event: MouseEvent): { x: number; y: number } {
  const rect = svg.getBoundingClientRect();
  const viewBox = (svg.getAttribute("viewBox") ?? "0 0 1 1").split(" ").map(Number);
  return {
    x: ((event.clientX - rect.left) / rect.width) * viewBox[2],
    y: ((event.clientY - rect.top) / rect.height) * viewBox[3],
  };
}

interface DragState {
  svg: SVGSVGElement;
  x0: number;
  y0: number;
}

let drag: DragState | null = null;

function pointsInRect(svg: SVGSVGElement, x0: number, y0: number, x1: number, y1: number): number[] {
  const [lox, hix] = x0 < x1 ? [x0, x1] : [x1, x0];
  const [loy, hiy] = y0 < y1 ? [y0, y1] : [y1, y0];
  const ids: number[] = [];
  svg.querySelectorAll<SVGCircleElement>("circle.point").forEach((c) => {
    const cx = Number(c.getAttribute("cx"));
    const cy = Number(c.getAttribute("cy"));
    if (cx >= lox && cx <= hix && cy >= loy && cy <= hiy) {
      ids.push(Number(c.getAttribute("data-id")));
    }
  });
  return ids;
}

function bindEvents(): void {
  root.addEventListener("change", async (event) => {
    const target = event.target as HTMLInputElement | HTMLSelectElement;
    const control = target.getAttribute("data-control");
    if (!state || !control) {
      return;
    }
    const checked = (target as HTMLInputElement).checked;
    switch (control) {
      case "hulls2d":
        state = patch(state, { hulls2d: checked });
        break;
      case "hullshd":
        state = patch(state, { hullsHd: checked });
        break;
      case "knn":
        state = patch(state, { knn: { ...state.knn, enabled: checked } });
        break;
      case "knn-k":
        state = patch(state, {
          knn: { ...state.knn, k: Math.max(1, Number(target.value) || 1) },
        });
        break;
      case "metric":
        state = patch(state, { metricColoring: target.value || null });
        break;
      case "summary":
        state = patch(state, { summaryFeature: target.value || null });
        break;
      case "matrices":
        state = patch(state, { matrices: { ...state.matrices, enabled: checked } });
        break;
      case "matrix-space":
        state = patch(state, {
          matrices: { ...state.matrices, space: target.value as "2d" | "hd" },
        });
        break;
      case "matrix-ordering":
        state = patch(state, {
          matrices: {
            ...state.matrices,
            ordering: target.value as "linkage" | "nn" | "greedy",
          },
        });
        break;
      case "dual":
        state = patch(state, { dual: checked });
        break;
      default:
        return;
    }
    await refetchOverlayData();
    render();
  });

  root.addEventListener("submit", async (event) => {
    const form = (event.target as HTMLElement).closest("form.session-form");
    if (!form) {
      return;
    }
    event.preventDefault();
    const filter = form.querySelector<HTMLInputElement>('[data-control="filter"]')?.value ?? "";
    const name = datasets[0]?.name;
    if (!name) {
      return;
    }
    try {
      await loadSession({ dataset: name, token_filter: filter, color_by: "pos" });
    } catch (err) {
      alert(String(err));
    }
  });

  root.addEventListener("click", (event) => {
    const circle = (event.target as HTMLElement).closest("circle.point");
    if (circle && state) {
      state = toggleBrush(state, Number(circle.getAttribute("data-id")));
      render();
    }
  });

  root.addEventListener("mousedown", (event) => {
    const svg = (event.target as HTMLElement).closest("svg.projection-row");
    if (!svg || (event.target as HTMLElement).closest("circle.point")) {
      return;
    }
    const at = svgPoint(svg as SVGSVGElement, event as MouseEvent);
    drag = { svg: svg as SVGSVGElement, x0: at.x, y0: at.y };
  });

  root.addEventListener("mouseup", (event) => {
    if (!drag || !state) {
      return;
    }
    const at = svgPoint(drag.svg, event as MouseEvent);
    const moved = Math.abs(at.x - drag.x0) > 3 || Math.abs(at.y - drag.y0) > 3;
    const ids = moved ? pointsInRect(drag.svg, drag.x0, drag.y0, at.x, at.y) : [];
    state = moved ? setBrush(state, ids) : clearBrush(state);
    drag = null;
    render();
  });

  root.addEventListener("mouseover", async (event) => {
    const circle = (event.target as HTMLElement).closest("circle.point");
    if (!circle || !state) {
      return;
    }
    const pid = Number(circle.getAttribute("data-id"));
    if (!contextCache[String(pid)]) {
      try {
        contextCache[String(pid)] = await api.context(state.sessionId, pid);
      } catch {
        return;
      }
    }
    state = setHover(state, pid);
    render();
  });

  root.addEventListener("mouseout", (event) => {
    if ((event.target as HTMLElement).closest("circle.point") && state) {
      state = setHover(state, null);
      render();
    }
  });
}

async function boot(): Promise<void> {
  bindEvents();
  try {
    datasets = (await api.listDatasets()).datasets;
  } catch (err) {
    root.innerHTML = `<div class="notice">cannot reach API at ${API_BASE}: ${String(err)}</div>`;
    return;
  }
  const usable = datasets.find((d) => !d.error);
  if (!usable) {
    root.innerHTML = `<div class="notice">no datasets under the server's data directory</div>`;
    return;
  }
  await loadSession({ dataset: usable.name, color_by: "pos" });
}

boot();
