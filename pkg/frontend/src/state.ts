/** View state: overlay toggles, brushing, hover. Pure data + reducers. */

export type MatrixSpace = "2d" | "hd";
export type MatrixOrdering = "linkage" | "nn" | "greedy";

export interface ViewState {
  sessionId: string;
  hulls2d: boolean;
  hullsHd: boolean;
  knn: { enabled: boolean; k: number };
  /** metric id for color overlay, or null to color by the session feature */
  metricColoring: string | null;
  /** feature whose summary labels are shown, or null to hide labels */
  summaryFeature: string | null;
  matrices: { enabled: boolean; space: MatrixSpace; ordering: MatrixOrdering };
  /** brushed global point ids, kept sorted and unique */
  brush: number[];
  hover: number | null;
  dual: boolean;
}

/** Expert-preferred start state: begin with components on, prune later.
 * k-NN lines and matrices start off (they dominate the view). */
export function defaultState(sessionId: string): ViewState {
  return {
    sessionId,
    hulls2d: true,
    hullsHd: true,
    knn: { enabled: false, k: 1 },
    metricColoring: null,
    summaryFeature: "pos",
    matrices: { enabled: false, space: "hd", ordering: "linkage" },
    brush: [],
    hover: null,
    dual: true,
  };
}

export function setBrush(state: ViewState, ids: number[]): ViewState {
  const unique = Array.from(new Set(ids)).sort((a, b) => a - b);
  return { ...state, brush: unique };
}

export function clearBrush(state: ViewState): ViewState {
  return { ...state, brush: [] };
}

export function toggleBrush(state: ViewState, id: number): ViewState {
  const current = new Set(state.brush);
  if (current.has(id)) {
    current.delete(id);
  } else {
    current.add(id);
  }
  return setBrush(state, Array.from(current));
}

export function setHover(state: ViewState, id: number | null): ViewState {
  return { ...state, hover: id };
}

export function patch(state: ViewState, changes: Partial<ViewState>): ViewState {
  return { ...state, ...changes };
}

export function isBrushed(state: ViewState, id: number): boolean {
  return state.brush.includes(id);
}
