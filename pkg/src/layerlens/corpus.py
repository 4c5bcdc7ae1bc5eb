"""Dataset ingestion: embedding tensors, token occurrences, annotations.

File formats (all little-endian, documented for external producers):

  * embeddings — "LFEB" v1 binary: magic ``LFEB``, u32 version=1,
    u32 n_layers, u32 n_points, u32 dim, then ``n_layers*n_points*dim``
    raw float32 values in layer-major, point-major, component-major order.
  * annotations — JSONL, one object per token occurrence with fields
    ``id``, ``token``, ``sentence_id``, ``token_index``, ``context_before``,
    ``context_after``, ``sentence`` and an optional ``annotations`` map
    keyed by ``pos`` / ``syncat`` / ``sense`` / ``ner``.
  * external 2D projections — JSON per method:
    ``{"method": str, "params": {...}, "layers": [[[x, y], ...], ...]}``.
  * manifest — JSON: ``{"name":…, "embeddings":…, "annotations":…,
    "projections": […]}`` with paths relative to the manifest file.

Filter expressions combine token matches and annotation equality:

    token == "cell"            exact token match
    token ^= "cel"             token prefix match
    pos == "NOUN"              annotation equality (pos/syncat/sense/ner,
                               token_index compares the stringified index)

joined with ``and`` / ``or`` (case-insensitive) and parentheses; ``and``
binds tighter than ``or``.
"""

from __future__ import annotations

import json
import re
import struct
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    CountMismatchError,
    FilterSyntaxError,
    FormatError,
    NonFiniteValueError,
    UnknownFeatureError,
)

LFEB_MAGIC = b"LFEB"
LFEB_VERSION = 1


class FeatureKind(Enum):
    POS = "pos"
    SYNCAT = "syncat"
    SENSE = "sense"
    NER = "ner"
    TOKEN_INDEX = "token_index"
    NGRAM = "ngram"

    @classmethod
    def from_name(cls, name: str) -> "FeatureKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise UnknownFeatureError(f"unknown feature kind {name!r}") from None


#: annotation-map keys allowed in the JSONL records
INGESTED_ANNOTATION_KINDS = (FeatureKind.POS, FeatureKind.SYNCAT, FeatureKind.SENSE, FeatureKind.NER)


@dataclass
class TokenOccurrence:
    id: int
    token: str
    sentence_id: int
    token_index: int
    context_before: list[str]
    context_after: list[str]
    sentence: str
    annotations: dict[FeatureKind, str] = field(default_factory=dict)


@dataclass
class EmbeddingTensor:
    n_layers: int
    n_points: int
    dim: int
    values: np.ndarray  # float32, shape (n_layers, n_points, dim)

    def layer(self, l: int) -> np.ndarray:
        return self.values[l]


@dataclass
class ExternalProjection:
    method: str
    params: dict
    layers: np.ndarray  # float64, shape (n_layers, n_points, 2)


@dataclass
class Dataset:
    name: str
    occurrences: list[TokenOccurrence]
    embeddings: EmbeddingTensor
    external_projections: dict[str, ExternalProjection] = field(default_factory=dict)

    @property
    def n_points(self) -> int:
        return self.embeddings.n_points

    @property
    def n_layers(self) -> int:
        return self.embeddings.n_layers

    def features_present(self) -> set[FeatureKind]:
        present = {FeatureKind.TOKEN_INDEX, FeatureKind.NGRAM}
        for occ in self.occurrences:
            present.update(occ.annotations.keys())
        return present


# ---------------------------------------------------------------------------
# LFEB binary embeddings
# ---------------------------------------------------------------------------

_HEADER = struct.Struct("<4sIIII")


def write_embeddings(path: str | Path, values: np.ndarray) -> None:
    arr = np.ascontiguousarray(values, dtype=np.float32)
    if arr.ndim != 3:
        raise FormatError("embedding tensor must be (n_layers, n_points, dim)")
    n_layers, n_points, dim = arr.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(LFEB_MAGIC, LFEB_VERSION, n_layers, n_points, dim))
        fh.write(arr.astype("<f4").tobytes())


def read_embeddings(path: str | Path) -> EmbeddingTensor:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError(f"{path}: file shorter than LFEB header")
    magic, version, n_layers, n_points, dim = _HEADER.unpack_from(raw)
    if magic != LFEB_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != LFEB_VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if min(n_layers, n_points, dim) < 1:
        raise FormatError(f"{path}: non-positive tensor dimension")
    expected = n_layers * n_points * dim * 4
    body = raw[_HEADER.size:]
    if len(body) != expected:
        raise FormatError(
            f"{path}: tensor payload is {len(body)} bytes, expected {expected}"
        )
    values = np.frombuffer(body, dtype="<f4").reshape(n_layers, n_points, dim)
    if not np.isfinite(values).all():
        raise NonFiniteValueError(f"{path}: embedding tensor contains NaN/Inf")
    return EmbeddingTensor(n_layers, n_points, dim, values)


# ---------------------------------------------------------------------------
# JSONL annotations
# ---------------------------------------------------------------------------


def _parse_occurrence(obj: dict, lineno: int) -> TokenOccurrence:
    try:
        occ = TokenOccurrence(
            id=int(obj["id"]),
            token=str(obj["token"]),
            sentence_id=int(obj["sentence_id"]),
            token_index=int(obj["token_index"]),
            context_before=[str(t) for t in obj.get("context_before", [])],
            context_after=[str(t) for t in obj.get("context_after", [])],
            sentence=str(obj["sentence"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"annotation line {lineno}: {exc!r}") from None
    raw_ann = obj.get("annotations", {})
    if not isinstance(raw_ann, dict):
        raise FormatError(f"annotation line {lineno}: annotations must be an object")
    for key, value in raw_ann.items():
        kind = FeatureKind.from_name(str(key))
        if kind not in INGESTED_ANNOTATION_KINDS:
            raise FormatError(
                f"annotation line {lineno}: {kind.value!r} cannot be ingested"
            )
        occ.annotations[kind] = str(value)
    if len(occ.context_before) > 2 or len(occ.context_after) > 2:
        raise FormatError(f"annotation line {lineno}: context window longer than 2")
    words = occ.sentence.split()
    if not (0 <= occ.token_index < len(words)) or words[occ.token_index] != occ.token:
        raise FormatError(
            f"annotation line {lineno}: token {occ.token!r} not at "
            f"whitespace position {occ.token_index} of its sentence"
        )
    return occ


def read_annotations(path: str | Path) -> list[TokenOccurrence]:
    occurrences = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"annotation line {lineno}: {exc}") from None
            occurrences.append(_parse_occurrence(obj, lineno))
    ids = sorted(o.id for o in occurrences)
    if ids != list(range(len(occurrences))):
        raise FormatError("occurrence ids must be unique and contiguous from 0")
    occurrences.sort(key=lambda o: o.id)
    return occurrences


def write_annotations(path: str | Path, occurrences: list[TokenOccurrence]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for occ in occurrences:
            obj = {
                "id": occ.id,
                "token": occ.token,
                "sentence_id": occ.sentence_id,
                "token_index": occ.token_index,
                "context_before": occ.context_before,
                "context_after": occ.context_after,
                "sentence": occ.sentence,
                "annotations": {k.value: v for k, v in occ.annotations.items()},
            }
            fh.write(json.dumps(obj, sort_keys=True, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# External projections + manifest
# ---------------------------------------------------------------------------


def read_projection(path: str | Path) -> ExternalProjection:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if not isinstance(obj, dict) or "method" not in obj or "layers" not in obj:
        raise FormatError(f"{path}: projection file needs 'method' and 'layers'")
    try:
        layers = np.asarray(obj["layers"], dtype=np.float64)
    except ValueError:
        raise FormatError(f"{path}: ragged projection coordinate array") from None
    if layers.ndim != 3 or layers.shape[2] != 2:
        raise FormatError(f"{path}: layers must have shape (n_layers, n_points, 2)")
    if not np.isfinite(layers).all():
        raise NonFiniteValueError(f"{path}: projection coordinates contain NaN/Inf")
    return ExternalProjection(str(obj["method"]), dict(obj.get("params", {})), layers)


def write_projection(path: str | Path, proj: ExternalProjection) -> None:
    obj = {
        "method": proj.method,
        "params": proj.params,
        "layers": [[[float(x), float(y)] for x, y in layer] for layer in proj.layers],
    }
    Path(path).write_text(json.dumps(obj, sort_keys=True), encoding="utf-8")


def load_dataset(manifest_path: str | Path) -> Dataset:
    manifest_path = Path(manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"{manifest_path}: {exc}") from None
    for key in ("name", "embeddings", "annotations"):
        if key not in manifest:
            raise FormatError(f"{manifest_path}: missing manifest key {key!r}")
    base = manifest_path.parent
    embeddings = read_embeddings(base / manifest["embeddings"])
    occurrences = read_annotations(base / manifest["annotations"])
    if len(occurrences) != embeddings.n_points:
        raise CountMismatchError(
            f"{len(occurrences)} annotation records vs n_points={embeddings.n_points}"
        )
    projections = {}
    for rel in manifest.get("projections", []):
        proj = read_projection(base / rel)
        if proj.layers.shape[0] != embeddings.n_layers or proj.layers.shape[1] != embeddings.n_points:
            raise CountMismatchError(
                f"projection {proj.method!r} has shape {proj.layers.shape[:2]}, "
                f"expected ({embeddings.n_layers}, {embeddings.n_points})"
            )
        projections[proj.method] = proj
    return Dataset(str(manifest["name"]), occurrences, embeddings, projections)


def write_dataset(dataset: Dataset, out_dir: str | Path) -> Path:
    """Write a dataset back to the documented formats; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_embeddings(out / "embeddings.lfeb", dataset.embeddings.values)
    write_annotations(out / "annotations.jsonl", dataset.occurrences)
    proj_files = []
    for name, proj in sorted(dataset.external_projections.items()):
        fname = f"projection_{name}.json"
        write_projection(out / fname, proj)
        proj_files.append(fname)
    manifest = {
        "name": dataset.name,
        "embeddings": "embeddings.lfeb",
        "annotations": "annotations.jsonl",
        "projections": proj_files,
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    return manifest_path


# ---------------------------------------------------------------------------
# Filter expressions
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<lparen>\() |
        (?P<rparen>\)) |
        (?P<op>==|\^=) |
        (?P<string>"[^"]*"|'[^']*') |
        (?P<word>[A-Za-z_][A-Za-z0-9_]*)
    )""",
    re.VERBOSE,
)


def _lex(query: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(query):
        m = _TOKEN_RE.match(query, pos)
        if m is None:
            if query[pos:].strip() == "":
                break
            raise FilterSyntaxError(f"cannot parse filter at {query[pos:pos+20]!r}")
        pos = m.end()
        kind = m.lastgroup
        text = m.group(kind)
        if kind == "word" and text.lower() in ("and", "or"):
            tokens.append((text.lower(), text))
        elif kind == "string":
            tokens.append(("string", text[1:-1]))
        else:
            tokens.append((kind, text))
    return tokens


class _Pred:
    def __init__(self, name: str, op: str, value: str):
        self.name = name
        self.op = op
        self.value = value

    def evaluate(self, dataset: Dataset) -> set[int]:
        name = self.name.lower()
        if name == "token":
            if self.op == "==":
                return {o.id for o in dataset.occurrences if o.token == self.value}
            return {o.id for o in dataset.occurrences if o.token.startswith(self.value)}
        kind = FeatureKind.from_name(name)
        if self.op != "==":
            raise FilterSyntaxError("prefix match (^=) only applies to token")
        if kind == FeatureKind.NGRAM:
            raise UnknownFeatureError("ngram is computed, not filterable")
        if kind == FeatureKind.TOKEN_INDEX:
            return {o.id for o in dataset.occurrences if str(o.token_index) == self.value}
        if all(kind not in o.annotations for o in dataset.occurrences):
            raise UnknownFeatureError(f"feature {kind.value!r} not present in dataset")
        return {
            o.id for o in dataset.occurrences if o.annotations.get(kind) == self.value
        }


class _BoolOp:
    def __init__(self, op: str, parts: list):
        self.op = op
        self.parts = parts

    def evaluate(self, dataset: Dataset) -> set[int]:
        results = [p.evaluate(dataset) for p in self.parts]
        out = results[0]
        for r in results[1:]:
            out = (out & r) if self.op == "and" else (out | r)
        return out


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, kind=None):
        tok = self.peek()
        if tok[0] is None or (kind is not None and tok[0] != kind):
            raise FilterSyntaxError(f"expected {kind or 'token'}, got {tok[1]!r}")
        self.pos += 1
        return tok

    def parse(self):
        node = self.parse_or()
        if self.peek()[0] is not None:
            raise FilterSyntaxError(f"trailing input at {self.peek()[1]!r}")
        return node

    def parse_or(self):
        parts = [self.parse_and()]
        while self.peek()[0] == "or":
            self.take("or")
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else _BoolOp("or", parts)

    def parse_and(self):
        parts = [self.parse_atom()]
        while self.peek()[0] == "and":
            self.take("and")
            parts.append(self.parse_atom())
        return parts[0] if len(parts) == 1 else _BoolOp("and", parts)

    def parse_atom(self):
        kind, _ = self.peek()
        if kind == "lparen":
            self.take("lparen")
            node = self.parse_or()
            self.take("rparen")
            return node
        name = self.take("word")[1]
        op = self.take("op")[1]
        value = self.take("string")[1]
        return _Pred(name, op, value)


def parse_filter(query: str):
    tokens = _lex(query)
    if not tokens:
        raise FilterSyntaxError("empty filter expression")
    return _Parser(tokens).parse()


def filter_occurrences(dataset: Dataset, query: str | None) -> list[int]:
    """Evaluate a filter expression; empty/None selects every occurrence."""
    if query is None or not query.strip():
        return [o.id for o in dataset.occurrences]
    node = parse_filter(query)
    return sorted(node.evaluate(dataset))
