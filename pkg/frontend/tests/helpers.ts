import { readFileSync } from "node:fs";

import {
  CloseReadingDoc,
  LayoutDoc,
  MatricesDoc,
  MetricsDoc,
  NeighborsDoc,
  OccurrenceDoc,
  SessionData,
} from "../src/types.js";

function load<T>(name: string): T {
  const url = new URL(`./fixtures/golden/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf-8")) as T;
}

export function goldenSession(): SessionData {
  return {
    layout: load<LayoutDoc>("layout.json"),
    metrics: load<MetricsDoc>("metrics.json"),
    matrices: load<MatricesDoc>("matrices.json"),
    neighbors: load<NeighborsDoc>("neighbors_k1.json"),
    closereading: load<CloseReadingDoc>("closereading_l0.json"),
    contexts: load<Record<string, OccurrenceDoc>>("contexts.json"),
  };
}
