"""HTTP service: datasets, sessions, and computed artifacts as JSON.

Sessions are immutable and content-addressed: POSTing a config returns the
hash-derived id, and identical configs share one cached computation
(duplicate concurrent POSTs block on a per-id lock instead of recomputing).
Every response body is produced by the same canonical serializer the CLI
uses, so repeated GETs are byte-identical.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import __version__
from .corpus import Dataset, load_dataset
from .errors import (
    CountMismatchError,
    EngineError,
    FilterSyntaxError,
    FormatError,
    InvalidConfigError,
    KOutOfRangeError,
    NonFiniteValueError,
    TooFewPointsError,
    TooManyPointsError,
    UnknownFeatureError,
    UnknownProjectionError,
)
from .session import (
    DEFAULT_POINT_CAP,
    SCHEMA_VERSION,
    SessionArtifacts,
    SessionConfig,
    canonical_json_bytes,
    closereading_doc,
    compute_session,
    context_doc,
    matrix_view_doc,
    neighbors_doc,
)

ENV_DATA_DIR = "LAYERLENS_DATA_DIR"
ENV_PORT = "LAYERLENS_PORT"
ENV_POINT_CAP = "LAYERLENS_POINT_CAP"

_STATUS_BY_CODE = {
    InvalidConfigError.code: 400,
    FilterSyntaxError.code: 400,
    UnknownFeatureError.code: 400,
    UnknownProjectionError.code: 400,
    KOutOfRangeError.code: 400,
    FormatError.code: 400,
    CountMismatchError.code: 400,
    NonFiniteValueError.code: 400,
    TooFewPointsError.code: 422,
    TooManyPointsError.code: 422,
}


class DatasetStore:
    """Datasets discovered from one directory, loaded lazily and cached."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self._cache: dict[str, Dataset] = {}
        self._lock = threading.Lock()

    def manifest_paths(self) -> dict[str, Path]:
        found: dict[str, Path] = {}
        if not self.data_dir.is_dir():
            return found
        candidates = sorted(self.data_dir.glob("*/manifest.json")) + sorted(
            self.data_dir.glob("*.manifest.json")
        )
        for path in candidates:
            try:
                name = json.loads(path.read_text(encoding="utf-8")).get("name")
            except (OSError, json.JSONDecodeError):
                continue
            if isinstance(name, str) and name not in found:
                found[name] = path
        return found

    def load(self, name: str) -> Dataset:
        with self._lock:
            if name in self._cache:
                return self._cache[name]
        paths = self.manifest_paths()
        if name not in paths:
            raise KeyError(name)
        dataset = load_dataset(paths[name])
        with self._lock:
            self._cache[name] = dataset
        return dataset

    def listing(self) -> list[dict]:
        out = []
        for name in sorted(self.manifest_paths()):
            entry: dict = {"name": name}
            try:
                dataset = self.load(name)
            except EngineError as exc:
                entry["error"] = str(exc)
            else:
                entry.update(
                    n_points=dataset.n_points,
                    n_layers=dataset.n_layers,
                    dim=dataset.embeddings.dim,
                    features=sorted(f.value for f in dataset.features_present()),
                    external_projections=sorted(dataset.external_projections),
                )
            out.append(entry)
        return out


class SessionStore:
    """Content-addressed session cache with single-flight computation."""

    def __init__(self, datasets: DatasetStore, point_cap: int):
        self.datasets = datasets
        self.point_cap = point_cap
        self._sessions: dict[str, SessionArtifacts] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._mutex = threading.Lock()
        self.compute_count = 0  # instrumentation; cache-hit tests read this

    def get(self, session_id: str) -> SessionArtifacts | None:
        with self._mutex:
            return self._sessions.get(session_id)

    def create(self, config: SessionConfig) -> SessionArtifacts:
        session_id = config.session_id
        with self._mutex:
            cached = self._sessions.get(session_id)
            if cached is not None:
                return cached
            lock = self._locks.setdefault(session_id, threading.Lock())
        with lock:
            with self._mutex:
                cached = self._sessions.get(session_id)
                if cached is not None:
                    return cached
            dataset = self.datasets.load(config.dataset)
            artifacts = compute_session(dataset, config, self.point_cap)
            with self._mutex:
                self._sessions[session_id] = artifacts
                self.compute_count += 1
            return artifacts


def _json_response(doc_or_bytes, status_code: int = 200) -> Response:
    body = doc_or_bytes if isinstance(doc_or_bytes, bytes) else canonical_json_bytes(doc_or_bytes)
    return Response(content=body, status_code=status_code, media_type="application/json")


def _error(status: int, code: str, message: str) -> Response:
    return _json_response({"v": SCHEMA_VERSION, "error": code, "message": message}, status)


def create_app(
    data_dir: str | Path | None = None,
    point_cap: int | None = None,
) -> FastAPI:
    data_dir = Path(data_dir or os.environ.get(ENV_DATA_DIR, "."))
    if point_cap is None:
        point_cap = int(os.environ.get(ENV_POINT_CAP, DEFAULT_POINT_CAP))
    app = FastAPI(title="layerlens", version=__version__)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    datasets = DatasetStore(data_dir)
    sessions = SessionStore(datasets, point_cap)
    app.state.sessions = sessions
    app.state.datasets = datasets

    def session_or_none(session_id: str) -> SessionArtifacts | None:
        return sessions.get(session_id)

    @app.get("/")
    def root():
        return _json_response(
            {
                "v": SCHEMA_VERSION,
                "service": "layerlens",
                "version": __version__,
                "endpoints": [
                    "/datasets",
                    "/sessions",
                    "/sessions/{id}/layout",
                    "/sessions/{id}/metrics",
                    "/sessions/{id}/matrices",
                    "/sessions/{id}/summaries",
                    "/sessions/{id}/layers/{layer}/matrix",
                    "/sessions/{id}/neighbors",
                    "/sessions/{id}/points/{pid}/context",
                    "/sessions/{id}/closereading",
                ],
            }
        )

    @app.get("/datasets")
    def list_datasets():
        return _json_response({"v": SCHEMA_VERSION, "datasets": datasets.listing()})

    @app.post("/sessions")
    async def create_session(request: Request):
        try:
            payload = await request.json()
        except Exception:
            return _error(400, "BAD_JSON", "request body is not valid JSON")
        try:
            config = SessionConfig.from_json(payload)
        except EngineError as exc:
            return _error(_STATUS_BY_CODE.get(exc.code, 400), exc.code, str(exc))
        try:
            artifacts = sessions.create(config)
        except KeyError:
            return _error(404, "UNKNOWN_DATASET", f"dataset {config.dataset!r} not found")
        except EngineError as exc:
            return _error(_STATUS_BY_CODE.get(exc.code, 400), exc.code, str(exc))
        return _json_response(
            {"v": SCHEMA_VERSION, "id": artifacts.session_id, "n_points": artifacts.n_points},
            status_code=201,
        )

    def _document(session_id: str, name: str) -> Response:
        artifacts = session_or_none(session_id)
        if artifacts is None:
            return _error(404, "UNKNOWN_SESSION", session_id)
        return _json_response(artifacts.documents[name])

    @app.get("/sessions/{session_id}/layout")
    def get_layout(session_id: str):
        return _document(session_id, "layout")

    @app.get("/sessions/{session_id}/metrics")
    def get_metrics(session_id: str):
        return _document(session_id, "metrics")

    @app.get("/sessions/{session_id}/matrices")
    def get_matrices(session_id: str):
        return _document(session_id, "matrices")

    @app.get("/sessions/{session_id}/summaries")
    def get_summaries(session_id: str):
        return _document(session_id, "summaries")

    @app.get("/sessions/{session_id}/layers/{layer}/matrix")
    def get_matrix(session_id: str, layer: str, space: str = "hd", ordering: str = "linkage", projection: int = 0):
        artifacts = session_or_none(session_id)
        if artifacts is None:
            return _error(404, "UNKNOWN_SESSION", session_id)
        if not layer.lstrip("-").isdigit():
            return _error(400, "BAD_LAYER", f"layer {layer!r} is not an integer")
        layer_no = int(layer)
        if space not in ("hd", "2d"):
            return _error(400, "BAD_SPACE", f"space must be 'hd' or '2d', got {space!r}")
        if ordering not in ("linkage", "nn", "greedy"):
            return _error(400, "BAD_ORDERING", f"unknown ordering {ordering!r}")
        if not (0 <= projection < len(artifacts.projections)):
            return _error(404, "UNKNOWN_PROJECTION_INDEX", str(projection))
        if layer_no not in artifacts.layer_ids:
            return _error(404, "UNKNOWN_LAYER", str(layer_no))
        return _json_response(matrix_view_doc(artifacts, layer_no, space, ordering, projection))

    @app.get("/sessions/{session_id}/neighbors")
    def get_neighbors(session_id: str, k: str = ""):
        artifacts = session_or_none(session_id)
        if artifacts is None:
            return _error(404, "UNKNOWN_SESSION", session_id)
        if not k.lstrip("-").isdigit():
            return _error(400, "BAD_K", f"k={k!r} is not an integer")
        try:
            return _json_response(neighbors_doc(artifacts, int(k)))
        except KOutOfRangeError as exc:
            return _error(400, exc.code, str(exc))

    @app.get("/sessions/{session_id}/points/{pid}/context")
    def get_context(session_id: str, pid: str):
        artifacts = session_or_none(session_id)
        if artifacts is None:
            return _error(404, "UNKNOWN_SESSION", session_id)
        if not pid.isdigit():
            return _error(400, "BAD_POINT_ID", f"point id {pid!r} is not numeric")
        point = int(pid)
        if point not in set(artifacts.ids):
            return _error(404, "UNKNOWN_POINT", f"point {point} outside session universe")
        return _json_response(context_doc(artifacts, point))

    @app.get("/sessions/{session_id}/closereading")
    def get_closereading(session_id: str, layer: str = "", projection: int = 0):
        artifacts = session_or_none(session_id)
        if artifacts is None:
            return _error(404, "UNKNOWN_SESSION", session_id)
        if not layer.lstrip("-").isdigit():
            return _error(400, "BAD_LAYER", f"layer {layer!r} is not an integer")
        layer_no = int(layer)
        if not (0 <= projection < len(artifacts.projections)):
            return _error(404, "UNKNOWN_PROJECTION_INDEX", str(projection))
        if layer_no not in artifacts.layer_ids:
            return _error(404, "UNKNOWN_LAYER", str(layer_no))
        return _json_response(closereading_doc(artifacts, layer_no, projection))

    return app
