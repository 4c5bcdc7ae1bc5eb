"""Session configuration, artifact computation, and JSON document builders.

A session is an immutable configuration (dataset, filter, projections,
clustering/metric/layout parameters) hashed to a content id. Computing a
session produces every artifact the workspace needs: per-layer projections,
dual-space clusterings, distance matrices with orderings, the full metric
suite, summaries, hulls, and the stretched flow geometry.

All documents serialize through one canonical encoder (sorted keys, fixed
separators), so the CLI files and the HTTP bodies for the same session are
byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .cluster import (
    ClusterAssignment,
    Linkage,
    Metric,
    cluster_layer,
    pairwise_distances,
)
from .corpus import Dataset, FeatureKind, TokenOccurrence, filter_occurrences
from .errors import (
    InvalidConfigError,
    KOutOfRangeError,
    TooFewPointsError,
    TooManyPointsError,
    UnknownFeatureError,
)
from .layout import (
    Frame,
    FlowPath,
    Hull,
    StretchedLayer,
    build_flow_paths,
    bundle_flows,
    convex_hull,
    normalize_and_frame,
    snap,
    stretch_clusters,
)
from .metrics import (
    KMode,
    MetricId,
    QualityReport,
    distance_metrics,
    fpr_fnr,
    hd_knn,
    kruskal_mst,
    neighbor_metrics,
    orientation,
)
from .projection import LayerProjection, ProjectionConfig, project_layers
from .seriation import order_greedy, order_linkage, order_nn_heuristic
from .summaries import certainty_band, summarize_cluster

SCHEMA_VERSION = 1
DEFAULT_POINT_CAP = 500
MIN_POINTS = 3

CATEGORICAL_PALETTE = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc949",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ab", "#86bcb6", "#d37295",
]

METRIC_SCALE = {
    "name": "inferno",
    "kind": "sequential",
    "description": "dark-to-bright perceptually uniform",
}
MATRIX_SCALE = {
    "name": "viridis",
    "kind": "sequential",
    "description": "dark blue (small distance) to yellow (large distance)",
}

MISSING_PROPERTY = "(none)"

_METRIC_NAMES = {m.value for m in MetricId}
_FEATURE_NAMES = {f.value for f in FeatureKind}


def canonical_json_bytes(doc) -> bytes:
    return json.dumps(
        doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False
    ).encode("utf-8")


def _floats(arr) -> list:
    return [float(v) for v in np.asarray(arr).ravel()]


def _pairs(arr) -> list:
    return [[float(x), float(y)] for x, y in np.asarray(arr)]


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass
class SessionConfig:
    dataset: str
    token_filter: str = ""
    projections: list[ProjectionConfig] = field(
        default_factory=lambda: [ProjectionConfig("pca")]
    )
    metric_2d: Metric = Metric.COSINE
    metric_hd: Metric = Metric.COSINE
    k: int | None = None  # neighborhood size; None resolves to min(5, n-1)
    k_mode: str = "fixed"  # "fixed" | "cluster"
    layers: tuple[int, int] | None = None  # inclusive range, None = all
    width: float = 200.0
    height: float = 200.0
    gap: float = 50.0
    padding: float | None = None  # None resolves to 2% of height
    color_by: str = "pos"  # feature-kind name or metric id

    def canonical(self) -> dict:
        return {
            "v": SCHEMA_VERSION,
            "dataset": self.dataset,
            "token_filter": self.token_filter,
            "projections": [
                {"method": p.method, "params": p.params} for p in self.projections
            ],
            "metric_2d": self.metric_2d.value,
            "metric_hd": self.metric_hd.value,
            "k": self.k,
            "k_mode": self.k_mode,
            "layers": list(self.layers) if self.layers is not None else None,
            "width": float(self.width),
            "height": float(self.height),
            "gap": float(self.gap),
            "padding": None if self.padding is None else float(self.padding),
            "color_by": self.color_by,
        }

    @property
    def session_id(self) -> str:
        return hashlib.sha256(canonical_json_bytes(self.canonical())).hexdigest()[:16]

    @classmethod
    def from_json(cls, obj: dict) -> "SessionConfig":
        if not isinstance(obj, dict) or "dataset" not in obj:
            raise InvalidConfigError("config must be an object with a 'dataset'")
        known = {
            "v", "dataset", "token_filter", "projections", "metric_2d", "metric_hd",
            "k", "k_mode", "layers", "width", "height", "gap", "padding", "color_by",
        }
        unknown = set(obj) - known
        if unknown:
            raise InvalidConfigError(f"unknown config fields: {sorted(unknown)}")
        raw_projections = obj.get("projections", [{"method": "pca"}])
        if not isinstance(raw_projections, list) or not (1 <= len(raw_projections) <= 2):
            raise InvalidConfigError("projections must list 1 or 2 entries")
        projections = []
        for entry in raw_projections:
            if isinstance(entry, str):
                projections.append(ProjectionConfig.parse(entry))
            elif isinstance(entry, dict) and "method" in entry:
                projections.append(
                    ProjectionConfig.parse(entry["method"], dict(entry.get("params", {})))
                )
            else:
                raise InvalidConfigError(f"bad projection entry: {entry!r}")
        try:
            metric_2d = Metric(obj.get("metric_2d", "cosine"))
            metric_hd = Metric(obj.get("metric_hd", "cosine"))
        except ValueError as exc:
            raise InvalidConfigError(str(exc)) from None
        k = obj.get("k")
        if k is not None and (not isinstance(k, int) or isinstance(k, bool)):
            raise InvalidConfigError("k must be an integer")
        k_mode = obj.get("k_mode", "fixed")
        if k_mode not in ("fixed", "cluster"):
            raise InvalidConfigError("k_mode must be 'fixed' or 'cluster'")
        layers = obj.get("layers")
        if layers is not None:
            if (
                not isinstance(layers, (list, tuple))
                or len(layers) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in layers)
                or layers[0] > layers[1]
                or layers[0] < 0
            ):
                raise InvalidConfigError("layers must be [first, last] with 0 <= first <= last")
            layers = (layers[0], layers[1])
        dims = {}
        for name, default, strict in (("width", 200.0, True), ("height", 200.0, True), ("gap", 50.0, False)):
            value = obj.get(name, default)
            bad_type = not isinstance(value, (int, float)) or isinstance(value, bool)
            if bad_type or (value <= 0 if strict else value < 0):
                raise InvalidConfigError(f"{name}={value!r} is not a legal dimension")
            dims[name] = float(value)
        padding = obj.get("padding")
        if padding is not None and (not isinstance(padding, (int, float)) or padding < 0):
            raise InvalidConfigError("padding must be non-negative")
        color_by = str(obj.get("color_by", "pos")).lower()
        if color_by not in _METRIC_NAMES and color_by not in _FEATURE_NAMES:
            raise InvalidConfigError(f"color_by {color_by!r} is neither feature nor metric")
        if color_by == FeatureKind.NGRAM.value:
            raise InvalidConfigError("color_by ngram is not supported (multi-valued)")
        return cls(
            dataset=str(obj["dataset"]),
            token_filter=str(obj.get("token_filter", "")),
            projections=projections,
            metric_2d=metric_2d,
            metric_hd=metric_hd,
            k=k,
            k_mode=k_mode,
            layers=layers,
            width=dims["width"],
            height=dims["height"],
            gap=dims["gap"],
            padding=None if padding is None else float(padding),
            color_by=color_by,
        )


# ---------------------------------------------------------------------------
# Artifacts
# ---------------------------------------------------------------------------


@dataclass
class LayerArtifacts:
    layer: int
    projection: LayerProjection
    clusters_2d: ClusterAssignment
    clusters_hd: ClusterAssignment
    dist_2d: np.ndarray
    dist_hd: np.ndarray
    orderings_2d: dict[str, list[int]]
    orderings_hd: dict[str, list[int]]
    reports: dict[MetricId, QualityReport]
    summaries_2d: dict[str, list]
    summaries_hd: dict[str, list]
    frame: Frame
    stretched: StretchedLayer
    hulls_2d: list[Hull]
    hulls_hd: list[Hull]


@dataclass
class ProjectionArtifacts:
    config: ProjectionConfig
    layers: list[LayerArtifacts]
    flows: list[list[FlowPath]]  # one list of bundles per layer transition
    height: float


@dataclass
class SessionArtifacts:
    session_id: str
    config: SessionConfig
    dataset: Dataset
    ids: list[int]
    layer_ids: list[int]
    k_resolved: int
    padding_resolved: float
    projections: list[ProjectionArtifacts]
    documents: dict[str, bytes] = field(default_factory=dict)

    @property
    def n_points(self) -> int:
        return len(self.ids)

    def occurrence(self, pid: int) -> TokenOccurrence:
        return self.dataset.occurrences[pid]


def _feature_of(occ: TokenOccurrence, kind: FeatureKind) -> str:
    if kind == FeatureKind.TOKEN_INDEX:
        return str(occ.token_index)
    return occ.annotations.get(kind, MISSING_PROPERTY)


def _summaries_for(
    dataset: Dataset,
    member_ids_by_cluster: dict[int, list[int]],
    universe: list[int],
    space: str,
    layer: int,
) -> dict[str, list]:
    out: dict[str, list] = {}
    for kind in sorted(dataset.features_present(), key=lambda f: f.value):
        entries = []
        for cluster_id in sorted(member_ids_by_cluster):
            members = member_ids_by_cluster[cluster_id]
            try:
                summary = summarize_cluster(
                    members, kind, dataset, universe, space, layer, cluster_id
                )
            except UnknownFeatureError:
                continue  # no values of this kind among the members
            entries.append(
                {
                    "cluster": cluster_id,
                    "label": summary.label,
                    "certainty": float(summary.certainty),
                    "band": certainty_band(summary.certainty).value,
                    "support": summary.support,
                    "size": len(members),
                }
            )
        if entries:
            out[kind.value] = entries
    return out


def _members_by_cluster(ids: list[int], labels: np.ndarray) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for idx, pid in enumerate(ids):
        out.setdefault(int(labels[idx]), []).append(pid)
    return out


def compute_session(
    dataset: Dataset, config: SessionConfig, point_cap: int = DEFAULT_POINT_CAP
) -> SessionArtifacts:
    ids = filter_occurrences(dataset, config.token_filter)
    if len(ids) < MIN_POINTS:
        raise TooFewPointsError(f"filter selected {len(ids)} points, need >= {MIN_POINTS}")
    if len(ids) > point_cap:
        raise TooManyPointsError(f"filter selected {len(ids)} points, cap is {point_cap}")
    n = len(ids)
    if config.layers is None:
        layer_ids = list(range(dataset.n_layers))
    else:
        first, last = config.layers
        if last >= dataset.n_layers:
            raise InvalidConfigError(
                f"layer range {config.layers} exceeds {dataset.n_layers} layers"
            )
        layer_ids = list(range(first, last + 1))
    k_res = config.k if config.k is not None else min(5, n - 1)
    if not (1 <= k_res <= n - 1):
        raise KOutOfRangeError(f"k={k_res} must be in [1, {n - 1}]")
    padding = (
        config.padding if config.padding is not None else 0.02 * config.height
    )
    padding = float(snap(padding))
    k_mode = KMode.fixed(k_res) if config.k_mode == "fixed" else KMode.cluster_size()

    if config.color_by in _FEATURE_NAMES:
        kind = FeatureKind(config.color_by)
        if kind not in dataset.features_present():
            raise UnknownFeatureError(f"color_by feature {config.color_by!r} not in dataset")

    property_by_index: dict[int, str] = {}
    bundle_kind = (
        FeatureKind(config.color_by) if config.color_by in _FEATURE_NAMES else None
    )
    for idx, pid in enumerate(ids):
        occ = dataset.occurrences[pid]
        property_by_index[idx] = (
            _feature_of(occ, bundle_kind) if bundle_kind is not None else ""
        )

    projection_artifacts = []
    for proj_config in config.projections:
        layer_projections = project_layers(dataset, proj_config, ids, layer_ids)
        scaled, frames = normalize_and_frame(
            layer_projections, config.width, config.height, config.gap
        )
        per_layer = []
        stretched_layers = []
        for li, proj in enumerate(layer_projections):
            coords = proj.coords
            hd = dataset.embeddings.layer(proj.layer)[np.asarray(ids)]
            clusters_2d = cluster_layer(coords, config.metric_2d, "2d", proj.layer)
            clusters_hd = cluster_layer(hd, config.metric_hd, "hd", proj.layer)
            dist_2d = pairwise_distances(coords, config.metric_2d)
            dist_hd = pairwise_distances(hd, config.metric_hd)
            orderings_2d = {
                "linkage": order_linkage(dist_2d, clusters_2d.linkage),
                "nn": order_nn_heuristic(dist_2d),
                "greedy": order_greedy(dist_2d),
            }
            orderings_hd = {
                "linkage": order_linkage(dist_hd, clusters_hd.linkage),
                "nn": order_nn_heuristic(dist_hd),
                "greedy": order_greedy(dist_hd),
            }
            mst = kruskal_mst(pairwise_distances(coords, Metric.EUCLIDEAN))
            fpr, fnr = fpr_fnr(clusters_hd, mst)
            reports = {}
            reports.update(neighbor_metrics(coords, hd, k_mode, clusters_hd, proj.layer))
            reports.update(distance_metrics(coords, hd, k_res, proj.layer))
            ones = np.ones(n)
            reports[MetricId.FPR] = QualityReport(
                proj.layer, MetricId.FPR, None, fpr, ones * 0.0, ones.copy()
            )
            reports[MetricId.FNR] = QualityReport(
                proj.layer, MetricId.FNR, None, fnr, ones * 0.0, ones.copy()
            )
            stretched = stretch_clusters(scaled[li], clusters_2d.labels, padding, proj.layer)
            stretched_layers.append(stretched)
            hulls_2d = [
                convex_hull(stretched.positions[clusters_2d.labels == c], "2d", c)
                for c in range(clusters_2d.k_clusters)
            ]
            hulls_hd = [
                convex_hull(stretched.positions[clusters_hd.labels == c], "hd", c)
                for c in range(clusters_hd.k_clusters)
            ]
            summaries_2d = _summaries_for(
                dataset, _members_by_cluster(ids, clusters_2d.labels), ids, "2d", proj.layer
            )
            summaries_hd = _summaries_for(
                dataset, _members_by_cluster(ids, clusters_hd.labels), ids, "hd", proj.layer
            )
            per_layer.append(
                LayerArtifacts(
                    proj.layer, proj, clusters_2d, clusters_hd, dist_2d, dist_hd,
                    orderings_2d, orderings_hd, reports, summaries_2d, summaries_hd,
                    frames[li], stretched, hulls_2d, hulls_hd,
                )
            )
        flows = []
        for li in range(len(per_layer) - 1):
            a = per_layer[li]
            b = per_layer[li + 1]
            pos_a = {i: tuple(a.stretched.positions[i]) for i in range(n)}
            pos_b = {i: tuple(b.stretched.positions[i]) for i in range(n)}
            raw = build_flow_paths(
                pos_a, pos_b, a.frame, b.frame, [(i, i) for i in range(n)], a.layer
            )
            bundles = bundle_flows(
                raw,
                {i: int(a.clusters_2d.labels[i]) for i in range(n)},
                {i: int(b.clusters_2d.labels[i]) for i in range(n)},
                property_by_index,
            )
            flows.append(bundles)
        height = max(layer.stretched.y_extent for layer in per_layer)
        projection_artifacts.append(
            ProjectionArtifacts(proj_config, per_layer, flows, height)
        )

    artifacts = SessionArtifacts(
        config.session_id,
        config,
        dataset,
        ids,
        layer_ids,
        k_res,
        padding,
        projection_artifacts,
    )
    artifacts.documents = {
        "layout": canonical_json_bytes(layout_doc(artifacts)),
        "metrics": canonical_json_bytes(metrics_doc(artifacts)),
        "matrices": canonical_json_bytes(matrices_doc(artifacts)),
        "summaries": canonical_json_bytes(summaries_doc(artifacts)),
    }
    return artifacts


# ---------------------------------------------------------------------------
# Document builders
# ---------------------------------------------------------------------------


def _feature_legend(artifacts: SessionArtifacts) -> tuple[list[dict], list[str]]:
    kind = FeatureKind(artifacts.config.color_by)
    values = [
        _feature_of(artifacts.dataset.occurrences[pid], kind) for pid in artifacts.ids
    ]
    labels = sorted(set(values))
    legend = [
        {"label": label, "color": CATEGORICAL_PALETTE[i % len(CATEGORICAL_PALETTE)]}
        for i, label in enumerate(labels)
    ]
    return legend, values


def _color_block(artifacts: SessionArtifacts) -> dict:
    by = artifacts.config.color_by
    if by in _FEATURE_NAMES:
        legend, values = _feature_legend(artifacts)
        return {"mode": "feature", "by": by, "legend": legend, "values": values}
    metric = MetricId(by)
    return {
        "mode": "metric",
        "by": by,
        "scale": METRIC_SCALE,
        "orientation": orientation(metric),
    }


def _metric_color_for_layer(layer_art: LayerArtifacts, metric: MetricId) -> dict:
    report = layer_art.reports[metric]
    span = report.hi - report.lo
    t = np.where(span > 0, (report.values - report.lo) / np.where(span > 0, span, 1.0), 0.5)
    return {"values": _floats(report.values), "t": _floats(np.clip(t, 0.0, 1.0))}


def _segments_json(path: FlowPath) -> list[dict]:
    out = []
    for seg in path.segments:
        entry = {
            "kind": seg.kind,
            "from": [seg.start[0], seg.start[1]],
            "to": [seg.end[0], seg.end[1]],
        }
        if seg.control is not None:
            entry["ctrl"] = [seg.control[0], seg.control[1]]
        out.append(entry)
    return out


def _hulls_json(hulls: list[Hull]) -> list[dict]:
    return [
        {
            "cluster": h.cluster_id,
            "color": CATEGORICAL_PALETTE[h.cluster_id % len(CATEGORICAL_PALETTE)],
            "vertices": [[x, y] for x, y in h.vertices],
        }
        for h in hulls
    ]


def layout_doc(artifacts: SessionArtifacts) -> dict:
    config = artifacts.config
    metric_mode = config.color_by in _METRIC_NAMES
    projections = []
    for proj_art in artifacts.projections:
        layers = []
        for layer_art in proj_art.layers:
            entry = {
                "layer": layer_art.layer,
                "frame": {
                    "x_left": layer_art.frame.x_left,
                    "x_right": layer_art.frame.x_right,
                    "width": layer_art.frame.width,
                    "gap": layer_art.frame.gap,
                },
                "points": _pairs(layer_art.stretched.positions),
                "clusters_2d": [int(v) for v in layer_art.clusters_2d.labels],
                "clusters_hd": [int(v) for v in layer_art.clusters_hd.labels],
                "cluster_offsets": {
                    str(c): float(off) for c, off in sorted(layer_art.stretched.offsets.items())
                },
                "hulls_2d": _hulls_json(layer_art.hulls_2d),
                "hulls_hd": _hulls_json(layer_art.hulls_hd),
                "summaries_2d": layer_art.summaries_2d,
                "summaries_hd": layer_art.summaries_hd,
            }
            if metric_mode:
                entry["metric_color"] = _metric_color_for_layer(
                    layer_art, MetricId(config.color_by)
                )
            layers.append(entry)
        flows = []
        for ti, bundles in enumerate(proj_art.flows):
            flow_entries = []
            for bundle in bundles:
                member_indices = [a for a, _ in bundle.links]
                means = {
                    metric.value: float(
                        np.mean(proj_art.layers[ti].reports[metric].values[member_indices])
                    )
                    for metric in MetricId
                }
                flow_entries.append(
                    {
                        "ids": [artifacts.ids[a] for a, _ in bundle.links],
                        "size": bundle.size,
                        "cluster_from": bundle.cluster_from,
                        "cluster_to": bundle.cluster_to,
                        "property": bundle.color_key,
                        "segments": _segments_json(bundle),
                        "metric_means": means,
                    }
                )
            flows.append({"from_layer": proj_art.layers[ti].layer, "bundles": flow_entries})
        projections.append(
            {
                "method": proj_art.config.method,
                "params": proj_art.config.params,
                "height": proj_art.height,
                "layers": layers,
                "flows": flows,
            }
        )
    return {
        "v": SCHEMA_VERSION,
        "session": artifacts.session_id,
        "config": config.canonical(),
        "ids": artifacts.ids,
        "tokens": [artifacts.dataset.occurrences[pid].token for pid in artifacts.ids],
        "colors": _color_block(artifacts),
        "projections": projections,
    }


def metrics_doc(artifacts: SessionArtifacts) -> dict:
    projections = []
    for proj_art in artifacts.projections:
        layers = []
        for layer_art in proj_art.layers:
            metric_block = {}
            for metric in MetricId:
                report = layer_art.reports[metric]
                entry = {
                    "values": _floats(report.values),
                    "orientation": orientation(metric),
                }
                if report.k_mode is not None:
                    entry["k_mode"] = report.k_mode.describe()
                lo, hi = report.lo, report.hi
                if np.all(lo == lo[0]) and np.all(hi == hi[0]):
                    entry["range"] = [float(lo[0]), float(hi[0])]
                else:
                    entry["lo"] = _floats(lo)
                    entry["hi"] = _floats(hi)
                metric_block[metric.value] = entry
            layers.append({"layer": layer_art.layer, "metrics": metric_block})
        projections.append({"method": proj_art.config.method, "layers": layers})
    return {
        "v": SCHEMA_VERSION,
        "session": artifacts.session_id,
        "ids": artifacts.ids,
        "projections": projections,
    }


def _matrix_space_json(
    dist: np.ndarray,
    orderings: dict[str, list[int]],
    linkage_used: Linkage,
    clusters_2d: np.ndarray,
    clusters_hd: np.ndarray,
) -> dict:
    def colors(labels):
        return [CATEGORICAL_PALETTE[int(c) % len(CATEGORICAL_PALETTE)] for c in labels]

    return {
        "dist": [[float(v) for v in row] for row in dist],
        "orderings": {name: list(perm) for name, perm in orderings.items()},
        "linkage_used": linkage_used.value,
        "col_clusters": [int(v) for v in clusters_2d],
        "col_colors": colors(clusters_2d),
        "row_clusters": [int(v) for v in clusters_hd],
        "row_colors": colors(clusters_hd),
    }


def matrices_doc(artifacts: SessionArtifacts) -> dict:
    projections = []
    for proj_art in artifacts.projections:
        layers = []
        for layer_art in proj_art.layers:
            layers.append(
                {
                    "layer": layer_art.layer,
                    "spaces": {
                        "2d": _matrix_space_json(
                            layer_art.dist_2d,
                            layer_art.orderings_2d,
                            layer_art.clusters_2d.linkage,
                            layer_art.clusters_2d.labels,
                            layer_art.clusters_hd.labels,
                        ),
                        "hd": _matrix_space_json(
                            layer_art.dist_hd,
                            layer_art.orderings_hd,
                            layer_art.clusters_hd.linkage,
                            layer_art.clusters_2d.labels,
                            layer_art.clusters_hd.labels,
                        ),
                    },
                }
            )
        projections.append({"method": proj_art.config.method, "layers": layers})
    return {
        "v": SCHEMA_VERSION,
        "session": artifacts.session_id,
        "ids": artifacts.ids,
        "scale": MATRIX_SCALE,
        "projections": projections,
    }


def summaries_doc(artifacts: SessionArtifacts) -> dict:
    projections = []
    for proj_art in artifacts.projections:
        layers = []
        for layer_art in proj_art.layers:
            layers.append(
                {
                    "layer": layer_art.layer,
                    "2d": layer_art.summaries_2d,
                    "hd": layer_art.summaries_hd,
                }
            )
        projections.append({"method": proj_art.config.method, "layers": layers})
    return {
        "v": SCHEMA_VERSION,
        "session": artifacts.session_id,
        "ids": artifacts.ids,
        "projections": projections,
    }


def matrix_view_doc(
    artifacts: SessionArtifacts, layer: int, space: str, ordering: str, projection: int
) -> dict:
    proj_art = artifacts.projections[projection]
    layer_art = next(la for la in proj_art.layers if la.layer == layer)
    if space == "2d":
        block = _matrix_space_json(
            layer_art.dist_2d, layer_art.orderings_2d, layer_art.clusters_2d.linkage,
            layer_art.clusters_2d.labels, layer_art.clusters_hd.labels,
        )
    else:
        block = _matrix_space_json(
            layer_art.dist_hd, layer_art.orderings_hd, layer_art.clusters_hd.linkage,
            layer_art.clusters_2d.labels, layer_art.clusters_hd.labels,
        )
    return {
        "v": SCHEMA_VERSION,
        "session": artifacts.session_id,
        "ids": artifacts.ids,
        "layer": layer,
        "space": space,
        "ordering": ordering,
        "order": block["orderings"][ordering],
        "dist": block["dist"],
        "linkage_used": block["linkage_used"],
        "col_clusters": block["col_clusters"],
        "col_colors": block["col_colors"],
        "row_clusters": block["row_clusters"],
        "row_colors": block["row_colors"],
        "scale": MATRIX_SCALE,
    }


def neighbors_doc(artifacts: SessionArtifacts, k: int) -> dict:
    n = artifacts.n_points
    if not (1 <= k <= n - 1):
        raise KOutOfRangeError(f"k={k} must be in [1, {n - 1}]")
    sel = np.asarray(artifacts.ids)
    layers = []
    for layer in artifacts.layer_ids:
        vectors = artifacts.dataset.embeddings.layer(layer)[sel]
        lists = hd_knn(vectors, k)
        layers.append([[artifacts.ids[j] for j in row] for row in lists])
    return {
        "v": SCHEMA_VERSION,
        "session": artifacts.session_id,
        "k": k,
        "ids": artifacts.ids,
        "layers": layers,
    }


def occurrence_doc(occ: TokenOccurrence) -> dict:
    return {
        "id": occ.id,
        "token": occ.token,
        "sentence_id": occ.sentence_id,
        "token_index": occ.token_index,
        "context_before": occ.context_before,
        "context_after": occ.context_after,
        "sentence": occ.sentence,
        "annotations": {k.value: v for k, v in sorted(occ.annotations.items(), key=lambda kv: kv[0].value)},
    }


def context_doc(artifacts: SessionArtifacts, pid: int) -> dict:
    doc = occurrence_doc(artifacts.occurrence(pid))
    doc["v"] = SCHEMA_VERSION
    doc["session"] = artifacts.session_id
    return doc


def closereading_doc(artifacts: SessionArtifacts, layer: int, projection: int) -> dict:
    proj_art = artifacts.projections[projection]
    layer_art = next(la for la in proj_art.layers if la.layer == layer)
    members = _members_by_cluster(artifacts.ids, layer_art.clusters_2d.labels)
    clusters = []
    for cluster_id in sorted(members):
        summaries = {
            feature: next(e for e in entries if e["cluster"] == cluster_id)
            for feature, entries in layer_art.summaries_2d.items()
            if any(e["cluster"] == cluster_id for e in entries)
        }
        clusters.append(
            {
                "cluster": cluster_id,
                "size": len(members[cluster_id]),
                "summaries": summaries,
                "members": [
                    occurrence_doc(artifacts.occurrence(pid)) for pid in members[cluster_id]
                ],
            }
        )
    return {
        "v": SCHEMA_VERSION,
        "session": artifacts.session_id,
        "layer": layer,
        "projection": projection,
        "clusters": clusters,
    }
