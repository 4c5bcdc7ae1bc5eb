"""Resolution-independent Sankey-style flow geometry.

Pipeline: per-layer coordinates are affinely fitted into horizontally
tiled frames, 2D clusters are stretched apart vertically, and each point's
trajectory between consecutive layers becomes a four-segment path (two
horizontal stubs bridged by two mirrored bézier curves). Paths sharing
(source cluster, target cluster, property) collapse into one bundle.

All emitted coordinates are snapped to a 2^-16 grid. Grid-aligned values
below 2^36 add without rounding, so translating a cluster during
stretching preserves within-cluster y-differences bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MissingPositionError
from .projection import LayerProjection

GRID = 1.0 / 65536.0


def snap(values):
    """Round to the 2^-16 grid (exact for magnitudes below 2^36)."""
    return np.round(np.asarray(values, dtype=np.float64) * 65536.0) / 65536.0


@dataclass
class Frame:
    layer: int
    x_left: float
    width: float
    gap: float

    @property
    def x_right(self) -> float:
        return self.x_left + self.width


@dataclass
class StretchedLayer:
    layer: int
    positions: np.ndarray  # (n, 2), frame-absolute, post-stretch
    offsets: dict[int, float]  # cluster id -> upward shift

    @property
    def y_extent(self) -> float:
        return float(self.positions[:, 1].max())


@dataclass
class Hull:
    space: str  # "2d" | "hd"
    cluster_id: int
    vertices: list[tuple[float, float]]


@dataclass
class PathSegment:
    kind: str  # "h" (horizontal line) | "c" (bézier with one control point)
    start: tuple[float, float]
    end: tuple[float, float]
    control: tuple[float, float] | None = None


@dataclass
class FlowPath:
    layer_from: int
    links: list[tuple[int, int]]  # (source id, target id) per member
    segments: list[PathSegment]  # four segments per member, concatenated
    color_key: str = ""
    cluster_from: int | None = None
    cluster_to: int | None = None

    @property
    def source_ids(self) -> list[int]:
        return [a for a, _ in self.links]

    @property
    def size(self) -> int:
        return len(self.links)


def normalize_and_frame(
    projections: list[LayerProjection],
    width: float,
    height: float,
    gap: float,
) -> tuple[list[np.ndarray], list[Frame]]:
    """Fit each layer's coordinates into its own width x height frame.

    Axes scale independently (the fit is aspect-free); an axis with a
    single distinct value centers instead. Frames tile left to right with
    the given gap.
    """
    if width <= 0 or height <= 0:
        raise ValueError("frame width and height must be positive")
    frames = []
    scaled = []
    for idx, proj in enumerate(projections):
        x_left = snap(idx * (width + gap)).item()
        frame = Frame(proj.layer, x_left, float(width), float(gap))
        coords = np.asarray(proj.coords, dtype=np.float64)
        out = np.empty_like(coords)
        for axis, extent, offset in ((0, width, x_left), (1, height, 0.0)):
            lo = coords[:, axis].min()
            hi = coords[:, axis].max()
            if hi > lo:
                out[:, axis] = (coords[:, axis] - lo) / (hi - lo) * extent + offset
            else:
                out[:, axis] = offset + extent / 2.0
        scaled.append(snap(out))
        frames.append(frame)
    return scaled, frames


def stretch_clusters(
    positions: np.ndarray,
    labels: np.ndarray,
    padding: float,
    layer: int = 0,
) -> StretchedLayer:
    """Move 2D clusters upward until their vertical extents are disjoint.

    Clusters are visited in ascending median-y order; a cluster whose
    min-y does not clear its predecessor's (post-shift) max-y is raised by
    exactly the overlap plus the padding. Within-cluster geometry is a pure
    translation.
    """
    positions = np.asarray(positions, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    pad = snap(max(padding, 0.0)).item()
    order = sorted(
        set(labels.tolist()),
        key=lambda c: (float(np.median(positions[labels == c, 1])), c),
    )
    offsets: dict[int, float] = {}
    out = positions.copy()
    prev_max = None
    for c in order:
        member_y = positions[labels == c, 1]
        lo = float(member_y.min())
        hi = float(member_y.max())
        shift = 0.0
        if prev_max is not None and lo <= prev_max:
            shift = prev_max - lo + pad
        offsets[c] = shift
        out[labels == c, 1] = member_y + shift
        prev_max = hi + shift
    return StretchedLayer(layer, out, offsets)


def build_flow_paths(
    positions_from: dict[int, tuple[float, float]],
    positions_to: dict[int, tuple[float, float]],
    frame_from: Frame,
    frame_to: Frame,
    links: list[tuple[int, int]],
    layer_from: int = 0,
) -> list[FlowPath]:
    """One unbundled four-segment path per linked point pair.

    For source (x1,y1) and target (x7,y3): a horizontal stub to the source
    frame's right border, a bézier to the midpoint between the frames at
    the vertical midpoint, its mirrored twin to the target frame's left
    border, and a horizontal stub to the target point.
    """
    x2 = frame_from.x_right
    x6 = frame_to.x_left
    x4 = (x2 + x6) / 2.0
    x3 = (x2 + x4) / 2.0
    x5 = (x4 + x6) / 2.0
    paths = []
    for a, b in links:
        if a not in positions_from or b not in positions_to:
            raise MissingPositionError(f"link ({a}, {b}) lacks a position")
        x1, y1 = positions_from[a]
        x7, y3 = positions_to[b]
        y2 = (y1 + y3) / 2.0
        segments = [
            PathSegment("h", (x1, y1), (x2, y1)),
            PathSegment("c", (x2, y1), (x4, y2), (x3, y1)),
            PathSegment("c", (x4, y2), (x6, y3), (x5, y3)),
            PathSegment("h", (x6, y3), (x7, y3)),
        ]
        paths.append(FlowPath(layer_from, [(a, b)], segments))
    return paths


def bundle_flows(
    paths: list[FlowPath],
    clusters_from: dict[int, int],
    clusters_to: dict[int, int],
    properties: dict[int, str],
) -> list[FlowPath]:
    """Group paths by (source cluster, target cluster, property value).

    Each group becomes one FlowPath carrying all member links and the
    concatenation of their segment runs; groups are emitted in sorted key
    order and partition the input.
    """
    groups: dict[tuple[int, int, str], list[FlowPath]] = {}
    for path in paths:
        ((a, b),) = path.links
        key = (clusters_from[a], clusters_to[b], str(properties[a]))
        groups.setdefault(key, []).append(path)
    bundles = []
    for key in sorted(groups):
        members = sorted(groups[key], key=lambda p: p.links[0])
        c_from, c_to, prop = key
        bundles.append(
            FlowPath(
                members[0].layer_from,
                [m.links[0] for m in members],
                [seg for m in members for seg in m.segments],
                color_key=prop,
                cluster_from=c_from,
                cluster_to=c_to,
            )
        )
    return bundles


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: np.ndarray, space: str = "2d", cluster_id: int = 0) -> Hull:
    """Monotone-chain hull; strictly convex vertex set.

    Collinear inputs collapse to the two extreme points, a single distinct
    point to one vertex.
    """
    pts = sorted({(float(x), float(y)) for x, y in np.asarray(points, dtype=np.float64)})
    if len(pts) == 1:
        return Hull(space, cluster_id, pts)
    if len(pts) == 2:
        return Hull(space, cluster_id, pts)
    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    vertices = lower[:-1] + upper[:-1]
    if len(vertices) < 3:  # all collinear
        vertices = [pts[0], pts[-1]]
    return Hull(space, cluster_id, vertices)
