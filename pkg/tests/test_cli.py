import csv
import json
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from randcomplex.cli import main
from randcomplex.complexes import SimplicialComplex
from randcomplex.io import FormatError, format_points, parse_config, parse_points, read_points
from randcomplex.geometry import PointSet

from conftest import SEVEN

ISOLATION_CFG = """
[process]
intensity = 2.0
window = [[0, 6], [0, 6]]
seed = 3

[complex]
rho = 0.4
flavor = RIPS

[target]
maximal_faces = [[0, 1, 2]]
representation = [[0, 0], [0.2, 0], [0.1, 0.17320508075688773]]

[experiment]
kind = isolation
trials = 20
"""

PERC_CFG = """
[process]
seed = 1

[complex]
rho = 1.0

[experiment]
kind = percolation
trials = 10
t_values = [0.0, 0.5, 4.0]
window_sizes = [6]
bootstrap = 20
"""


@pytest.fixture
def seven_csv(tmp_path):
    p = tmp_path / "seven.csv"
    p.write_text(format_points(PointSet(SEVEN)))
    return p


def run(*args):
    return main([str(a) for a in args])


class TestPointsFormat:
    def test_round_trip_exact(self, rng):
        X = PointSet(rng.normal(size=(20, 3)))
        assert parse_points(format_points(X)) == X

    def test_header_optional(self):
        assert parse_points("1,2\n3,4\n").dim == 2

    def test_header_mismatch(self):
        with pytest.raises(FormatError):
            parse_points("# dim=3\n1,2\n")

    def test_ragged(self):
        with pytest.raises(FormatError, match="line 2"):
            parse_points("1,2\n3\n")

    def test_empty_needs_header(self):
        assert len(parse_points("# dim=2\n")) == 0
        with pytest.raises(FormatError):
            parse_points("")

    def test_decimal_parsing_round_to_nearest(self):
        assert parse_points("0.1,0.7\n").coords.tolist() == [[0.1, 0.7]]


class TestConfig:
    def test_isolation(self):
        cfg = parse_config(ISOLATION_CFG)
        assert cfg.kind == "isolation" and cfg.window.volume == 36 and cfg.seed == 3
        assert cfg.target.f_vector() == [3, 3, 1] and cfg.representation.shape == (3, 2)

    def test_missing_target(self):
        with pytest.raises(FormatError, match="target"):
            parse_config("[experiment]\nkind = isolation\n")

    def test_bad_kind(self):
        with pytest.raises(FormatError, match="kind"):
            parse_config("[experiment]\nkind = nope\n")

    def test_unknown_section(self):
        with pytest.raises(FormatError):
            parse_config("[extra]\na = 1\n")


class TestCommands:
    def test_build_seven_point_set(self, seven_csv, tmp_path):
        r, c = tmp_path / "r.json", tmp_path / "c.json"
        assert run("build", seven_csv, "--rho", 2.4, "--flavor", "RIPS", "-o", r) == 0
        assert run("build", seven_csv, "--rho", 2.4, "--flavor", "CECH", "-o", c) == 0
        K = SimplicialComplex.from_json(json.loads(r.read_text()))
        L = SimplicialComplex.from_json(json.loads(c.read_text()))
        fk, fl = K.f_vector(), L.f_vector()
        assert fk[:2] == fl[:2] and fk[2] == fl[2] + 1 and fk[3:] == fl[3:]
        assert set(K.faces) - set(L.faces) == {(0, 1, 2)}

    def test_betti_tetrahedron_boundary(self, tmp_path):
        src, out = tmp_path / "k.json", tmp_path / "b.json"
        K = SimplicialComplex.from_faces([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])
        src.write_text(json.dumps(K.to_json()))
        assert run("betti", src, "-o", out) == 0
        assert json.loads(out.read_text()) == {"field": "GF2", "betti": [1, 0, 1]}

    def test_dist(self, tmp_path):
        a, b, out = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "d.json"
        a.write_text("0,0\n1,0\n1,1\n")
        b.write_text("-1,1\n0,1\n-1,0\n")
        assert run("dist", a, b, "-o", out) == 0
        d = json.loads(out.read_text())
        assert d["bottleneck"] == pytest.approx(2) and d["hausdorff"] == pytest.approx(2 ** 0.5)

    def test_dist_size_mismatch_is_inf(self, tmp_path):
        a, b, out = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "d.json"
        a.write_text("0,0\n")
        b.write_text("0,0\n1,1\n")
        assert run("dist", a, b, "-o", out) == 0
        assert json.loads(out.read_text())["bottleneck"] == "inf"

    def test_generic(self, tmp_path):
        src, out = tmp_path / "p.csv", tmp_path / "g.json"
        src.write_text("0,0\n2,0\n4,0\n")
        assert run("generic", src, "--rho", 2.0, "--verify-trials", 10, "--seed", 1, "-o", out) == 0
        g = json.loads(out.read_text())
        assert g["margin_input"] == 0 and g["rescaled"] and g["certificate"]["margin"] > 0
        assert g["verification"]["passed"]

    def test_detect(self, tmp_path):
        pts, tgt, out = tmp_path / "p.csv", tmp_path / "t.json", tmp_path / "o.json"
        pts.write_text("5,5\n5.5,5\n1,1\n")
        tgt.write_text(json.dumps(SimplicialComplex.from_faces([(0, 1)]).to_json()))
        assert run("detect", pts, "--rho", 1, "--flavor", "RIPS", "--target", tgt,
                   "--window", "[[0,10],[0,10]]", "--kind", "isolated", "-o", out) == 0
        rep = json.loads(out.read_text())
        assert [o["vertices"] for o in rep["occurrences"]] == [[0, 1]]

    def test_experiment(self, tmp_path):
        cfg, out = tmp_path / "e.ini", tmp_path / "r.json"
        cfg.write_text(ISOLATION_CFG)
        assert run("experiment", cfg, "-o", out) == 0
        rep = json.loads(out.read_text())
        assert rep["schema_version"] == 1 and rep["kind"] == "isolation" and rep["trials"] == 20

    def test_percolation_csv(self, tmp_path):
        cfg, out = tmp_path / "p.ini", tmp_path / "curve.csv"
        cfg.write_text(PERC_CFG)
        assert run("percolation", cfg, "-o", out) == 0
        rows = list(csv.DictReader(out.open()))
        assert list(rows[0]) == ["t", "window", "crossing_fraction", "stderr"]
        assert len(rows) == 3 and float(rows[0]["crossing_fraction"]) == 0.0

    @pytest.mark.parametrize("argv", [
        ["build", "missing.csv", "--rho", "1", "-o", "x.json"],
        ["sample", "--intensity", "-1", "--window", "[[0,1],[0,1]]", "-o", "x.csv"],
        ["sample", "--intensity", "1", "--window", "[[0,1],[0]]", "-o", "x.csv"],
        ["sample", "--intensity", "1", "-o", "x.csv"],
    ])
    def test_errors_exit_nonzero(self, argv, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        assert main(argv) != 0
        assert "error" in capsys.readouterr().err

    def test_bad_points_file(self, tmp_path, capsys):
        src = tmp_path / "bad.csv"
        src.write_text("1,2\nx,3\n")
        assert run("build", src, "--rho", 1, "-o", tmp_path / "o.json") == 1
        assert "line 2" in capsys.readouterr().err


def test_console_script_entry(tmp_path):
    out = tmp_path / "s.csv"
    proc = subprocess.run([sys.executable, "-m", "randcomplex.cli", "sample", "--intensity", "3",
                           "--window", "[[0,2],[0,2]]", "--seed", "7", "-o", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert read_points(out).dim == 2
