/** Payload types mirroring the versioned JSON documents served by the engine. */

export type Pair = [number, number];

export interface FrameBlock {
  x_left: number;
  x_right: number;
  width: number;
  gap: number;
}

export interface HullBlock {
  cluster: number;
  color: string;
  vertices: Pair[];
}

export interface SummaryEntry {
  cluster: number;
  label: string;
  certainty: number;
  band: "green" | "yellow" | "red";
  support: number;
  size: number;
}

export interface Segment {
  kind: "h" | "c";
  from: Pair;
  to: Pair;
  ctrl?: Pair;
}

export interface BundleBlock {
  ids: number[];
  size: number;
  cluster_from: number;
  cluster_to: number;
  property: string;
  segments: Segment[];
  metric_means: Record<string, number>;
}

export interface FlowBlock {
  from_layer: number;
  bundles: BundleBlock[];
}

export interface LayerBlock {
  layer: number;
  frame: FrameBlock;
  points: Pair[];
  clusters_2d: number[];
  clusters_hd: number[];
  cluster_offsets: Record<string, number>;
  hulls_2d: HullBlock[];
  hulls_hd: HullBlock[];
  summaries_2d: Record<string, SummaryEntry[]>;
  summaries_hd: Record<string, SummaryEntry[]>;
  metric_color?: { values: number[]; t: number[] };
}

export interface ProjectionBlock {
  method: string;
  params: Record<string, unknown>;
  height: number;
  layers: LayerBlock[];
  flows: FlowBlock[];
}

export interface FeatureColors {
  mode: "feature";
  by: string;
  legend: { label: string; color: string }[];
  values: string[];
}

export interface MetricColors {
  mode: "metric";
  by: string;
  scale: { name: string };
  orientation: string;
}

export type ColorBlock = FeatureColors | MetricColors;

export interface LayoutDoc {
  v: number;
  session: string;
  config: Record<string, unknown>;
  ids: number[];
  tokens: string[];
  colors: ColorBlock;
  projections: ProjectionBlock[];
}

export interface MetricEntry {
  values: number[];
  orientation: string;
  k_mode?: string;
  range?: [number, number];
  lo?: number[];
  hi?: number[];
}

export interface MetricsDoc {
  v: number;
  session: string;
  ids: number[];
  projections: {
    method: string;
    layers: { layer: number; metrics: Record<string, MetricEntry> }[];
  }[];
}

export interface MatrixSpaceBlock {
  dist: number[][];
  orderings: Record<string, number[]>;
  linkage_used: string;
  col_clusters: number[];
  col_colors: string[];
  row_clusters: number[];
  row_colors: string[];
}

export interface MatricesDoc {
  v: number;
  session: string;
  ids: number[];
  scale: { name: string };
  projections: {
    method: string;
    layers: { layer: number; spaces: Record<"2d" | "hd", MatrixSpaceBlock> }[];
  }[];
}

export interface NeighborsDoc {
  v: number;
  session: string;
  k: number;
  ids: number[];
  layers: number[][][];
}

export interface OccurrenceDoc {
  id: number;
  token: string;
  sentence_id: number;
  token_index: number;
  context_before: string[];
  context_after: string[];
  sentence: string;
  annotations: Record<string, string>;
}

export interface CloseReadingCluster {
  cluster: number;
  size: number;
  summaries: Record<string, SummaryEntry>;
  members: OccurrenceDoc[];
}

export interface CloseReadingDoc {
  v: number;
  session: string;
  layer: number;
  projection: number;
  clusters: CloseReadingCluster[];
}

export interface DatasetInfo {
  name: string;
  n_points?: number;
  n_layers?: number;
  dim?: number;
  features?: string[];
  external_projections?: string[];
  error?: string;
}

/** Everything the renderer needs for one session. */
export interface SessionData {
  layout: LayoutDoc;
  metrics: MetricsDoc;
  matrices: MatricesDoc | null;
  neighbors: NeighborsDoc | null;
  closereading: CloseReadingDoc | null;
  contexts: Record<string, OccurrenceDoc>;
}
