import json

import pytest
from fastapi.testclient import TestClient

from layerlens.cli import main
from layerlens.corpus import write_dataset
from layerlens.service import create_app
from layerlens.synthetic import make_dataset


@pytest.fixture(scope="module")
def demo(tmp_path_factory):
    root = tmp_path_factory.mktemp("clidata")
    dataset, _ = make_dataset(n_points=36, n_layers=2, dim=8, seed=3)
    manifest = write_dataset(dataset, root / "synthetic")
    return root, manifest


def test_validate_ok(demo, capsys):
    _, manifest = demo
    assert main(["validate", "--manifest", str(manifest)]) == 0
    assert "ok:" in capsys.readouterr().out


def test_validate_truncated(demo, tmp_path, capsys):
    root, manifest = demo
    import shutil

    shutil.copytree(manifest.parent, tmp_path / "broken", dirs_exist_ok=True)
    lfeb = tmp_path / "broken" / "embeddings.lfeb"
    lfeb.write_bytes(lfeb.read_bytes()[:-3])
    code = main(["validate", "--manifest", str(tmp_path / "broken" / "manifest.json")])
    assert code == 1
    assert "FORMAT_ERROR" in capsys.readouterr().err


def test_validate_missing_file(tmp_path, capsys):
    assert main(["validate", "--manifest", str(tmp_path / "none.json")]) == 1


def test_compute_writes_four_files(demo, tmp_path):
    _, manifest = demo
    out = tmp_path / "out"
    code = main(
        ["compute", "--manifest", str(manifest), "--projection", "pca", "--out", str(out)]
    )
    assert code == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["layout.json", "matrices.json", "metrics.json", "summaries.json"]
    layout = json.loads((out / "layout.json").read_text())
    assert layout["v"] == 1


def test_compute_deterministic(demo, tmp_path):
    _, manifest = demo
    args = ["compute", "--manifest", str(manifest), "--filter", 'token == "strike"', "--out"]
    assert main(args + [str(tmp_path / "a")]) == 0
    assert main(args + [str(tmp_path / "b")]) == 0
    for name in ("layout.json", "metrics.json", "matrices.json", "summaries.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_compute_too_few_points(demo, tmp_path, capsys):
    _, manifest = demo
    code = main(
        [
            "compute",
            "--manifest",
            str(manifest),
            "--filter",
            'token_index == "99"',
            "--out",
            str(tmp_path / "x"),
        ]
    )
    assert code == 2
    assert "TOO_FEW_POINTS" in capsys.readouterr().err


def test_compute_bad_layer_range(demo, tmp_path):
    _, manifest = demo
    code = main(
        ["compute", "--manifest", str(manifest), "--layers", "nope", "--out", str(tmp_path / "y")]
    )
    assert code == 1


def test_compute_layer_range(demo, tmp_path):
    _, manifest = demo
    out = tmp_path / "ranged"
    code = main(
        ["compute", "--manifest", str(manifest), "--layers", "1-1", "--out", str(out)]
    )
    assert code == 0
    layout = json.loads((out / "layout.json").read_text())
    layers = layout["projections"][0]["layers"]
    assert [entry["layer"] for entry in layers] == [1]
    assert layout["projections"][0]["flows"] == []


def test_compute_layer_range_out_of_bounds(demo, tmp_path):
    _, manifest = demo
    code = main(
        ["compute", "--manifest", str(manifest), "--layers", "0-9", "--out", str(tmp_path / "z")]
    )
    assert code == 1


def test_compute_matches_service_bytes(demo, tmp_path):
    root, manifest = demo
    out = tmp_path / "parity"
    assert (
        main(
            [
                "compute",
                "--manifest",
                str(manifest),
                "--filter",
                "",
                "--projection",
                "pca",
                "--k",
                "4",
                "--out",
                str(out),
            ]
        )
        == 0
    )
    client = TestClient(create_app(root))
    response = client.post(
        "/sessions",
        json={"dataset": "synthetic", "token_filter": "", "projections": ["pca"], "k": 4},
    )
    assert response.status_code == 201
    sid = response.json()["id"]
    for name in ("layout", "metrics", "matrices", "summaries"):
        served = client.get(f"/sessions/{sid}/{name}").content
        stored = (out / f"{name}.json").read_bytes()
        assert served == stored, name


def test_synth_roundtrip(tmp_path, capsys):
    code = main(
        ["synth", "--out", str(tmp_path / "gen"), "--points", "30", "--layers", "2", "--dim", "6"]
    )
    assert code == 0
    assert main(["validate", "--manifest", str(tmp_path / "gen" / "manifest.json")]) == 0
