import json
import math
import subprocess
import sys

import numpy as np
import pytest

from areatype import CanonicalForm, Configuration, LatticeSpec, count_area_types_float
from areatype.cli import main


def run_cli(args: list[str], stdin: str | None = None):
    proc = subprocess.run(
        [sys.executable, "-m", "areatype", *args],
        input=stdin,
        capture_output=True,
        text=True,
    )
    return proc


def test_canonicalize_stdin_example():
    conf = {"k": 2, "points": [[1, 0], [0, 5], [2, 3]]}
    proc = run_cli(["canonicalize"], stdin=json.dumps(conf))
    assert proc.returncode == 0
    out = json.loads(proc.stdout)
    assert out["schema"] == "areatype/v1"
    assert out["t"] == [5, 2, 3]
    # round-trips into the originating type
    form = CanonicalForm.from_json(out)
    assert form.k == 2


def test_canonicalize_degenerate_exit_code():
    conf = {"k": 1, "points": [[1, 0], [2, 0]]}
    proc = run_cli(["canonicalize"], stdin=json.dumps(conf))
    assert proc.returncode == 2
    assert "error" in proc.stderr


def test_compare_files(tmp_path):
    x = tmp_path / "x.json"
    y = tmp_path / "y.json"
    x.write_text(json.dumps(Configuration.from_pairs([(1, 0), (0, 1), (0.5, 0.5)]).to_json()))
    y.write_text(json.dumps(Configuration.from_pairs([(1, 0), (0, 1), (0.5, 0.6)]).to_json()))
    out = tmp_path / "cmp.json"
    code = main(["compare", "--x", str(x), "--y", str(y), "--tol", "1e-6", "--out", str(out)])
    assert code == 0
    blob = json.loads(out.read_text())
    assert blob["same_area_type"] is False
    assert blob["canonical_distance"] > 0


def test_compare_with_stability(tmp_path):
    x = tmp_path / "x.json"
    x.write_text(json.dumps(Configuration.from_pairs([(1, 0), (0, 1), (0.5, 0.5)]).to_json()))
    out = tmp_path / "cmp.json"
    code = main(
        ["compare", "--x", str(x), "--y", str(x), "--c", "0.25", "--eps", "0.1", "--out", str(out)]
    )
    assert code == 0
    blob = json.loads(out.read_text())
    assert blob["stability"]["premise_i_holds"] is True
    assert blob["stability"]["bound_i_satisfied"] is True


def test_count_csv_matches_library(tmp_path):
    out = tmp_path / "count.csv"
    code = main(["count", "--q", "2", "--k", "1", "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "q,k,exact_upper,float_count,degenerate_excluded,tolerance,seconds"
    row = lines[1].split(",")
    report = count_area_types_float(LatticeSpec(2, 1.0), 1, tol=1e-9)
    assert int(row[2]) == report.exact_upper == 20
    assert int(row[3]) == report.float_count == 13
    assert int(row[4]) == report.degenerate_excluded == 0


def test_sweep_count_csv_and_slope(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["sweep-count", "--q", "4..8:2", "--k", "1", "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 5  # header + 3 rows + slope comment
    assert lines[-1].startswith("# slope=")
    slope = float(lines[-1].split("slope=")[1].split()[0])
    assert 0 < slope <= 3.3


def test_sweep_count_json(tmp_path):
    out = tmp_path / "sweep.json"
    code = main(["sweep-count", "--q", "4,6,8", "--k", "1", "--format", "json", "--out", str(out)])
    assert code == 0
    blob = json.loads(out.read_text())
    assert blob["schema"] == "areatype/v1"
    assert len(blob["rows"]) == 3
    assert blob["reference_exponent"] == 3


def test_budget_exit_code(tmp_path):
    out = tmp_path / "count.csv"
    code = main(["count", "--q", "12", "--k", "2", "--budget", "100", "--out", str(out)])
    assert code == 3


def test_budget_env(tmp_path, monkeypatch):
    monkeypatch.setenv("AREATYPE_BUDGET", "100")
    out = tmp_path / "count.csv"
    code = main(["count", "--q", "12", "--k", "2", "--out", str(out)])
    assert code == 3


def test_bad_config_exit_code():
    proc = run_cli(["generate", "--kind", "nope"])
    assert proc.returncode == 2


def test_generate_lattice_csv(tmp_path):
    out = tmp_path / "lattice.csv"
    code = main(["generate", "--kind", "lattice", "--q", "4", "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "r,a,x,y"
    assert len(lines) == 16  # header + 15 points


def test_generate_cantor_binary(tmp_path):
    out = tmp_path / "measure.gmes"
    code = main(
        ["generate", "--kind", "cantor", "--s", "1.5", "--grid-n", "64", "--seed", "5", "--out", str(out)]
    )
    assert code == 0
    from areatype import load_grid_measure

    m = load_grid_measure(out)
    assert m.N == 64
    assert m.s == 1.5
    sidecar = json.loads(out.with_suffix(out.suffix + ".json").read_text())
    assert sidecar["schema"] == "areatype/v1"


def test_generate_requires_seed(tmp_path):
    code = main(["generate", "--kind", "annulus", "--out", str(tmp_path / "a.csv")])
    assert code == 2


def test_generate_annulus_deterministic(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert main(["generate", "--kind", "annulus", "--count", "500", "--seed", "3", "--out", str(a)]) == 0
    assert main(["generate", "--kind", "annulus", "--count", "500", "--seed", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_box_measure_single_q(tmp_path):
    out = tmp_path / "box.csv"
    code = main(
        [
            "box-measure",
            "--q", "4",
            "--k", "2",
            "--s", "1.1",
            "--points-per-cell", "2",
            "--seed", "1",
            "--out", str(out),
        ]
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "q,k,s,eps,points,tuples,occupied,estimate"
    row = lines[1].split(",")
    assert int(row[0]) == 4
    assert int(row[6]) > 0


def test_box_measure_save_cells(tmp_path):
    prefix = tmp_path / "cells"
    out = tmp_path / "box.csv"
    code = main(
        [
            "box-measure",
            "--q", "4",
            "--k", "1",
            "--s", "1.0",
            "--points-per-cell", "1",
            "--seed", "1",
            "--save-cells", str(prefix),
            "--out", str(out),
        ]
    )
    assert code == 0
    cells = (tmp_path / "cells.q4.csv").read_text().strip().splitlines()
    assert cells[0] == "i1,count"
    assert len(cells) > 1


def test_nu_l2_csv(tmp_path):
    out = tmp_path / "nu.csv"
    code = main(
        [
            "nu-l2",
            "--measure", "annulus",
            "--k", "1",
            "--eps", "0.0625,0.03125",
            "--samples", "200000",
            "--cloud-size", "100000",
            "--seed", "9",
            "--out", str(out),
        ]
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "eps,occupied,total,l2"
    assert len(lines) == 3
    l2s = [float(l.split(",")[3]) for l in lines[1:]]
    assert max(l2s) / min(l2s) < 1.5


def test_lp_slopes_csv(tmp_path):
    out = tmp_path / "lp.csv"
    code = main(
        ["lp-slopes", "--s", "1.0", "--grid-n", "256", "--j", "3..5", "--seed", "2", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "j,sup_norm,l2_norm"
    assert lines[-1].startswith("# sup_slope=")


def test_run_declarative(tmp_path):
    cfg = tmp_path / "exp.json"
    out = tmp_path / "sweep.csv"
    cfg.write_text(
        json.dumps({"command": "sweep-count", "q": [4, 6, 8], "k": 1, "out": str(out)})
    )
    code = main(["run", "--config", str(cfg)])
    assert code == 0
    assert out.exists()


def test_io_error_exit_code(tmp_path):
    out = tmp_path / "nodir" / "deep" / "count.csv"
    code = main(["count", "--q", "2", "--k", "1", "--out", str(out)])
    assert code == 4


def test_threads_do_not_change_output(tmp_path):
    outs = []
    for threads, name in ((1, "a.csv"), (4, "b.csv")):
        out = tmp_path / name
        code = main(
            [
                "nu-l2",
                "--measure", "segment",
                "--k", "1",
                "--eps", "0.0625",
                "--samples", "300000",
                "--cloud-size", "50000",
                "--seed", "4",
                "--threads", str(threads),
                "--out", str(out),
            ]
        )
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
