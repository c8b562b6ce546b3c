import json
import math
from pathlib import Path

import pytest

from localhom import cli
from localhom.cli import main
from localhom.relhom import HomologySignature


def _generate_circle(tmp_path, n=70, eps=0.05):
    out = tmp_path / "circle.csv"
    rc = main(["generate", "--shape", "circle", "--eps", str(eps),
               "--n", str(n), "-o", str(out)])
    assert rc == 0
    return out


def test_generate_writes_sample_and_sidecar(tmp_path, capsys):
    out = _generate_circle(tmp_path)
    blob = json.loads(capsys.readouterr().out)
    assert blob["n"] == 70 and blob["noisy"] is False
    assert blob["hausdorff"] + blob["hausdorff_error_bound"] < 0.05
    assert out.exists() and out.with_suffix(".meta.json").exists()


def test_generate_too_sparse_is_validation_error(tmp_path):
    rc = main(["generate", "--shape", "circle", "--eps", "0.01",
               "--n", "20", "-o", str(tmp_path / "x.csv")])
    assert rc == 2


def test_scales_selector_json(tmp_path):
    out = tmp_path / "scales.json"
    rc = main(["scales", "--c", "sqrt2", "--t", "0", "--eps", "0.05",
               "--select", "manifold", "--nu", "1.0",
               "--R", "1.0", "--r", "0.5", "-o", str(out)])
    assert rc == 0
    blob = json.loads(out.read_text())
    assert blob["regime"] == "manifold" and blob["warnings"] == []
    assert blob["ball_R"] == 1.0 and blob["ball_r"] == 0.5
    assert blob["scale2"] == pytest.approx((1 + math.sqrt(2)) * 0.05)


def test_scales_missing_eps_is_validation_error():
    assert main(["scales", "--select", "manifold", "--nu", "1.0"]) == 2


def test_scales_infeasible_exit_code():
    rc = main(["scales", "--c", "sqrt2", "--t", "0", "--eps", "0.14",
               "--select", "manifold", "--nu", "1.0"])
    assert rc == 3


def test_manual_scales_need_all_four():
    rc = main(["scales", "--eps", "0.05", "--scale1", "0.05",
               "--scale2", "0.12"])
    assert rc == 3


def test_infer_roundtrip_circle(tmp_path):
    sample = _generate_circle(tmp_path)
    report_path = tmp_path / "report.json"
    rc = main(["infer", "--sample", str(sample), "--c", "sqrt2",
               "--select", "manifold", "--nu", "1.0",
               "--R", "1.0", "--r", "0.5", "-o", str(report_path)])
    assert rc == 0
    blob = json.loads(report_path.read_text())
    assert blob["accuracy"]["overall"] == 1.0
    assert all(p["ranks"] == {"0": 0, "1": 1} and p["label"] == "rank1"
               for p in blob["points"])


def test_infer_byte_identical_reruns(tmp_path):
    sample = _generate_circle(tmp_path)
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        rc = main(["infer", "--sample", str(sample), "--c", "sqrt2",
                   "--select", "manifold", "--nu", "1.0",
                   "--R", "1.0", "--r", "0.5", "-o", str(path)])
        assert rc == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_infer_missing_sample_is_validation_error(tmp_path):
    rc = main(["infer", "--sample", str(tmp_path / "missing.csv"),
               "--select", "manifold", "--nu", "1.0"])
    assert rc == 2


def test_group_circle_single_group(tmp_path):
    sample = _generate_circle(tmp_path)
    out = tmp_path / "groups.json"
    rc = main(["group", "--sample", str(sample), "--c", "sqrt2",
               "--select", "manifold", "--nu", "1.0",
               "--R", "1.0", "--r", "0.5", "-o", str(out)])
    assert rc == 0
    blob = json.loads(out.read_text())
    assert blob["heuristic"] is True
    assert blob["n_groups"] == 1 and blob["groups"] == [list(range(70))]


def test_scan_writes_csv_and_summary(tmp_path):
    out = tmp_path / "scan.csv"
    rc = main(["scan", "--shape", "circle", "--x", "1.0,0.0",
               "--alpha", "0.12", "--eps", "0.05", "--grid", "0.2:1.6:8",
               "--dense-n", "300", "-o", str(out)])
    assert rc == 0
    assert out.read_text().startswith("R,r,member\n")
    blob = json.loads(Path(str(out) + ".json").read_text())
    assert blob["empirical"] is True
    assert blob["properties"]["interval_ok"] is True
    assert blob["summary"]["tau"] > 0


def test_scan_infeasible_grid(tmp_path):
    rc = main(["scan", "--shape", "circle", "--x", "1.0,0.0",
               "--alpha", "0.5", "--eps", "0.05", "--grid", "0.1:0.4:4"])
    assert rc == 2


def test_check_prints_tally(capsys):
    rc = main(["check", "--random", "25", "--seed", "3"])
    assert rc == 0
    assert "25/25 direct==coned" in capsys.readouterr().out


def test_check_mismatch_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(
        cli, "image_rank_oracle",
        lambda spec, pts: HomologySignature({0: 99}, "coned"))
    rc = main(["check", "--random", "3", "--seed", "3"])
    assert rc == 4
    assert "direct==coned" in capsys.readouterr().out


def test_plot_svg(tmp_path):
    sample = _generate_circle(tmp_path)
    report_path = tmp_path / "report.json"
    main(["infer", "--sample", str(sample), "--c", "sqrt2",
          "--select", "manifold", "--nu", "1.0",
          "--R", "1.0", "--r", "0.5", "-o", str(report_path)])
    svg_path = tmp_path / "plot.svg"
    rc = main(["plot", "--report", str(report_path), "--overlay-shape",
               "-o", str(svg_path)])
    assert rc == 0
    svg = svg_path.read_text()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<circle") >= 70


def test_emit_json_formatting():
    out = cli.emit_json({"a": 1.0, "b": 0.5, "z": None, "l": [True, 2]})
    assert out == '{"a": 1.0, "b": 0.5, "z": null, "l": [true, 2]}\n'
    with pytest.raises(ValueError):
        cli.emit_json(float("nan"))
