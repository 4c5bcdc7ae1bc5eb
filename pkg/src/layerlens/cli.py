"""Command-line entry points.

    layerlens validate --manifest data/demo/manifest.json
    layerlens compute  --manifest ... --filter 'token == "cell"' \
                       --projection pca --out out/
    layerlens serve    --data-dir data/ --port 8765
    layerlens synth    --out data/demo [--points 150 --layers 4]

Exit codes: 0 ok, 1 validation failure, 2 computation precondition,
3 I/O or startup failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .corpus import load_dataset
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
from .session import DEFAULT_POINT_CAP, SessionConfig, compute_session

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PRECONDITION = 2
EXIT_IO = 3

_VALIDATION_CODES = {
    FormatError.code,
    CountMismatchError.code,
    NonFiniteValueError.code,
    InvalidConfigError.code,
    FilterSyntaxError.code,
    UnknownFeatureError.code,
    UnknownProjectionError.code,
}
_PRECONDITION_CODES = {
    TooFewPointsError.code,
    TooManyPointsError.code,
    KOutOfRangeError.code,
}


def _exit_code_for(exc: EngineError) -> int:
    if exc.code in _PRECONDITION_CODES:
        return EXIT_PRECONDITION
    if exc.code in _VALIDATION_CODES:
        return EXIT_VALIDATION
    return EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="layerlens")
    sub = parser.add_subparsers(dest="command", required=True)

    validate = sub.add_parser("validate", help="validate a dataset manifest")
    validate.add_argument("--manifest", required=True)

    compute = sub.add_parser("compute", help="compute session artifacts to files")
    compute.add_argument("--manifest", required=True)
    compute.add_argument("--filter", default="", help="token/annotation filter expression")
    compute.add_argument(
        "--projection",
        action="append",
        default=None,
        help="pca or external:NAME (repeat for two projections)",
    )
    compute.add_argument("--layers", default=None, metavar="A-B", help="inclusive layer range")
    compute.add_argument("--k", type=int, default=None)
    compute.add_argument("--k-mode", choices=("fixed", "cluster"), default="fixed")
    compute.add_argument("--metric-2d", choices=("cosine", "euclidean"), default="cosine")
    compute.add_argument("--metric-hd", choices=("cosine", "euclidean"), default="cosine")
    compute.add_argument("--width", type=float, default=200.0)
    compute.add_argument("--height", type=float, default=200.0)
    compute.add_argument("--gap", type=float, default=50.0)
    compute.add_argument("--padding", type=float, default=None)
    compute.add_argument("--color-by", default="pos")
    compute.add_argument("--point-cap", type=int, default=DEFAULT_POINT_CAP)
    compute.add_argument("--out", required=True, help="output directory")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--data-dir", default=None)
    serve.add_argument("--port", type=int, default=None)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--point-cap", type=int, default=None)

    synth = sub.add_parser("synth", help="write a synthetic demo dataset")
    synth.add_argument("--out", required=True)
    synth.add_argument("--points", type=int, default=150)
    synth.add_argument("--layers", type=int, default=4)
    synth.add_argument("--dim", type=int, default=16)
    synth.add_argument("--seed", type=int, default=7)
    synth.add_argument("--name", default="synthetic")
    synth.add_argument("--with-external", action="store_true")

    return parser


def _parse_layer_range(text: str | None):
    if text is None:
        return None
    parts = text.split("-")
    if len(parts) != 2 or not all(p.strip().isdigit() for p in parts):
        raise InvalidConfigError(f"--layers expects A-B, got {text!r}")
    return [int(parts[0]), int(parts[1])]


def cmd_validate(args) -> int:
    try:
        dataset = load_dataset(args.manifest)
    except EngineError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(
        f"ok: {dataset.name}: {dataset.n_points} points x {dataset.n_layers} layers "
        f"x dim {dataset.embeddings.dim}; features: "
        f"{', '.join(sorted(f.value for f in dataset.features_present()))}"
    )
    return EXIT_OK


def cmd_compute(args) -> int:
    try:
        dataset = load_dataset(args.manifest)
        config = SessionConfig.from_json(
            {
                "dataset": dataset.name,
                "token_filter": args.filter,
                "projections": [{"method": p} for p in (args.projection or ["pca"])],
                "metric_2d": args.metric_2d,
                "metric_hd": args.metric_hd,
                "k": args.k,
                "k_mode": args.k_mode,
                "layers": _parse_layer_range(args.layers),
                "width": args.width,
                "height": args.height,
                "gap": args.gap,
                "padding": args.padding,
                "color_by": args.color_by,
            }
        )
        artifacts = compute_session(dataset, config, args.point_cap)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code_for(exc)
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name in ("layout", "metrics", "matrices", "summaries"):
            (out / f"{name}.json").write_bytes(artifacts.documents[name])
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"session {artifacts.session_id}: wrote 4 files to {out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import os

    import uvicorn

    from .service import ENV_DATA_DIR, ENV_PORT, create_app

    data_dir = args.data_dir or os.environ.get(ENV_DATA_DIR, ".")
    if not Path(data_dir).is_dir():
        print(f"error: data directory {data_dir!r} is not readable", file=sys.stderr)
        return EXIT_IO
    port = args.port or int(os.environ.get(ENV_PORT, 8765))
    app = create_app(data_dir, args.point_cap)
    try:
        uvicorn.run(app, host=args.host, port=port, log_level="warning")
    except (OSError, SystemExit) as exc:
        print(f"error: could not serve on port {port}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_synth(args) -> int:
    from .corpus import write_dataset
    from .synthetic import make_dataset

    dataset, _ = make_dataset(
        n_points=args.points,
        n_layers=args.layers,
        dim=args.dim,
        seed=args.seed,
        name=args.name,
        with_external=args.with_external,
    )
    try:
        manifest = write_dataset(dataset, args.out)
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {dataset.name} ({dataset.n_points} points) to {manifest}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "validate": cmd_validate,
        "compute": cmd_compute,
        "serve": cmd_serve,
        "synth": cmd_synth,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
