/** Settings sidebars: data/session config (left), uncertainty overlays (right). */

import { ViewState } from "../state.js";
import { DatasetInfo, SessionData } from "../types.js";
import { VNode, h } from "../vdom.js";

const METRICS = [
  "pps", "compression", "stretching", "agg_error", "true_neighbors",
  "false_neighbors", "missing_neighbors", "lcmc", "fpr", "fnr",
];

function checkbox(control: string, label: string, checked: boolean): VNode {
  return h(
    "label",
    { class: "toggle" },
    h("input", {
      type: "checkbox",
      "data-control": control,
      ...(checked ? { checked: "checked" } : {}),
    }),
    label,
  );
}

function select(control: string, options: string[], value: string | null, none?: string): VNode {
  const opts: VNode[] = [];
  if (none !== undefined) {
    opts.push(h("option", { value: "", ...(value === null ? { selected: "selected" } : {}) }, none));
  }
  for (const opt of options) {
    opts.push(
      h("option", { value: opt, ...(value === opt ? { selected: "selected" } : {}) }, opt),
    );
  }
  return h("select", { "data-control": control }, ...opts);
}

export function renderLeftSidebar(
  data: SessionData,
  datasets: DatasetInfo[] | null,
): VNode {
  const config = data.layout.config;
  const legend =
    data.layout.colors.mode === "feature"
      ? h(
          "div",
          { class: "legend" },
          ...data.layout.colors.legend.map((e) =>
            h(
              "div",
              { class: "legend-entry" },
              h("span", { class: "swatch", style: `background:${e.color}` }),
              e.label,
            ),
          ),
        )
      : h(
          "div",
          { class: "legend metric-legend" },
          `metric ${data.layout.colors.by} (${data.layout.colors.orientation.replace(/_/g, " ")})`,
        );
  const datasetRows = (datasets ?? []).map((d) =>
    h(
      "div",
      { class: "dataset-row", "data-dataset": d.name },
      d.error ? `${d.name} (broken)` : `${d.name} · ${d.n_points} pts · ${d.n_layers} layers`,
    ),
  );
  return h(
    "aside",
    { class: "sidebar sidebar-left" },
    h("h2", {}, "layerlens"),
    h("div", { class: "session-block" },
      h("div", { class: "kv" }, h("b", {}, "dataset "), String(config["dataset"] ?? "")),
      h("div", { class: "kv" }, h("b", {}, "session "), data.layout.session),
      h("div", { class: "kv" }, h("b", {}, "filter "), String(config["token_filter"] || "(all)")),
      h("div", { class: "kv" }, h("b", {}, "points "), String(data.layout.ids.length)),
      h(
        "div",
        { class: "kv" },
        h("b", {}, "projections "),
        data.layout.projections.map((p) => p.method).join(" + "),
      ),
    ),
    h("h3", {}, "color legend"),
    legend,
    h("h3", {}, "datasets"),
    h("div", { class: "dataset-list" }, ...datasetRows),
    h(
      "form",
      { class: "session-form" },
      h("input", { type: "text", "data-control": "filter", placeholder: 'token == "cell"' }),
      h("button", { type: "submit", "data-control": "create" }, "new session"),
    ),
  );
}

export function renderRightSidebar(state: ViewState, data: SessionData): VNode {
  const features = Object.keys(
    data.layout.projections[0].layers[0].summaries_2d,
  ).sort();
  return h(
    "aside",
    { class: "sidebar sidebar-right" },
    h("h3", {}, "uncertainty components"),
    checkbox("hulls2d", "2D cluster hulls", state.hulls2d),
    checkbox("hullshd", "HD cluster hulls", state.hullsHd),
    h(
      "div",
      { class: "toggle-row" },
      checkbox("knn", "HD k-NN connections", state.knn.enabled),
      h("input", {
        type: "number",
        "data-control": "knn-k",
        min: 1,
        value: String(state.knn.k),
      }),
    ),
    h(
      "div",
      { class: "toggle-row" },
      "metric coloring ",
      select("metric", METRICS, state.metricColoring, "(by feature)"),
    ),
    h(
      "div",
      { class: "toggle-row" },
      "summary labels ",
      select("summary", features, state.summaryFeature, "(off)"),
    ),
    checkbox("matrices", "distance matrices", state.matrices.enabled),
    h(
      "div",
      { class: "toggle-row" },
      select("matrix-space", ["2d", "hd"], state.matrices.space),
      select("matrix-ordering", ["linkage", "nn", "greedy"], state.matrices.ordering),
    ),
    checkbox("dual", "both projections", state.dual),
    h(
      "div",
      { class: "brush-info" },
      state.brush.length ? `${state.brush.length} points brushed` : "no brush",
    ),
  );
}
