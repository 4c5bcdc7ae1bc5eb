/** Close-reading panel: 2D clusters with summaries and member texts. */

import { BAND_COLORS, CERTAINTY_BAR_WIDTH } from "../scales.js";
import { ViewState } from "../state.js";
import { CloseReadingDoc } from "../types.js";
import { VNode, fmt, h } from "../vdom.js";

export function renderCloseReading(state: ViewState, doc: CloseReadingDoc | null): VNode {
  if (doc === null) {
    return h("section", { class: "closereading empty" });
  }
  const brushSet = new Set(state.brush);
  const feature = state.summaryFeature ?? "pos";
  const groups = doc.clusters.map((cluster) => {
    const summary = cluster.summaries[feature];
    const header: (VNode | string)[] = [
      h("span", { class: "cluster-name" }, `cluster ${cluster.cluster}`),
      h("span", { class: "cluster-size" }, `${cluster.size} points`),
    ];
    if (summary) {
      header.push(
        h("span", { class: "summary-label" }, summary.label),
        h(
          "span",
          { class: "certainty-wrap", title: `certainty ${fmt(summary.certainty)}` },
          h("span", {
            class: "certainty-bar",
            style: `width:${fmt(summary.certainty * CERTAINTY_BAR_WIDTH)}px;background:${BAND_COLORS[summary.band]}`,
            "data-certainty": fmt(summary.certainty),
            "data-band": summary.band,
          }),
        ),
      );
    }
    const members = cluster.members.map((m) => {
      const brushed = brushSet.has(m.id);
      return h(
        "span",
        {
          class: `member${brushed ? " brushed" : ""}`,
          "data-id": m.id,
          title: m.sentence,
        },
        `${[...m.context_before, ""].join(" ")}`,
        h("b", {}, m.token),
        `${["", ...m.context_after].join(" ")}`,
      );
    });
    return h(
      "div",
      { class: "cluster-group", "data-cluster": cluster.cluster },
      h("header", {}, ...header),
      h("div", { class: "members" }, ...members),
    );
  });
  return h(
    "section",
    { class: "closereading", "data-layer": doc.layer },
    h("h3", {}, `close reading · layer ${doc.layer}`),
    ...groups,
  );
}
