import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from bpgeom import Ball, bp_compare, errors
from bpgeom import cli
from bpgeom.report import canonical_json, render_report
from bpgeom.errors import UnsupportedFormat

GOLDEN = Path(__file__).parent / "golden"


def run(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "bpgeom", *args], capture_output=True, text=True, cwd=cwd)


def write_body(path, spec):
    path.write_text(json.dumps(spec))
    return str(path)


@pytest.fixture
def ball05(tmp_path):
    return write_body(tmp_path / "ball05.json", {"n": 3, "shape": "ball", "params": {"radius": 0.5}})


def test_volume_command_near_full_hemisphere(tmp_path):
    body = write_body(tmp_path / "b.json", {"n": 2, "shape": "ball", "params": {"radius": 1 - 1e-9}})
    out = run("volume", "--model", "s", "--body", body)
    assert out.returncode == 0, out.stderr
    assert json.loads(out.stdout)["volume"] == pytest.approx(2 * np.pi, abs=1e-6)


def test_section_command(ball05):
    out = run("section", "--model", "h", "--body", ball05, "--xi", "0,0,1")
    assert json.loads(out.stdout)["section_volume"] == pytest.approx(4 * np.pi / 3, rel=1e-8)


def test_compare_identical(ball05):
    out = run("compare", "--model", "e", "--K", ball05, "--L", ball05, "--grid", "8")
    rep = json.loads(out.stdout)
    assert rep["verdict"] == "consistent"
    assert rep["max_section_gap"] == 0.0


def test_compare_csv_and_determinism(ball05, tmp_path):
    a = run("compare", "--K", ball05, "--L", ball05, "--grid", "4", "--format", "csv")
    b = run("compare", "--K", ball05, "--L", ball05, "--grid", "4", "--format", "csv")
    assert a.stdout == b.stdout
    lines = a.stdout.strip().splitlines()
    assert lines[0] == "angle,section_K,section_L,gap" and len(lines) == 5


def test_other_subcommands(ball05):
    assert json.loads(run("radon", "--n", "3", "--coeffs", "1").stdout)["radon"] == pytest.approx(2 * np.pi)
    four = json.loads(run("fourier", "--body", ball05, "--k", "1").stdout)
    assert four["value"] == pytest.approx(2 * np.pi, rel=1e-6)
    prof = json.loads(run("profile", "--body", ball05, "--zs", "0,0.25").stdout)
    assert prof["A"][1] == pytest.approx(np.pi * (0.25 - 0.0625), rel=1e-9)
    conv = json.loads(run("convexity", "--body", ball05, "--grid", "200").stdout)
    assert conv["s_convex"] == "yes"
    par = json.loads(run("parseval", "--K", ball05, "--L", ball05).stdout)
    assert par["relative_difference"] < 1e-4


@pytest.mark.slow
def test_counterexample_command(tmp_path):
    out = run("counterexample", "--space", "h", "--n", "3", "--out", "rep.json", cwd=tmp_path)
    assert out.returncode == 0, out.stderr
    rep = json.loads((tmp_path / "rep.json").read_text())
    assert rep["verdict"] == "counterexample"


def test_validation_errors_exit_2(tmp_path, ball05):
    out = run("volume", "--body", str(tmp_path / "missing.json"))
    assert out.returncode == 2
    assert json.loads(out.stderr)["error"] == "validation"
    bad = write_body(tmp_path / "bad.json", {"n": 3, "shape": "ball", "params": {"radius": 1, "x": 2}})
    assert run("volume", "--body", bad).returncode == 2
    big = write_body(tmp_path / "big.json", {"n": 3, "shape": "ball", "params": {"radius": 1.2}})
    out = run("volume", "--model", "s", "--body", big)
    assert out.returncode == 2 and json.loads(out.stderr)["error"] == "model_domain"
    (tmp_path / "junk.json").write_text("{not json")
    assert run("volume", "--body", str(tmp_path / "junk.json")).returncode == 2
    assert run("volume", "--body", ball05, "--format", "svg").returncode == 2
    assert run("compare", "--K", ball05).returncode == 2


@pytest.mark.parametrize("exc", [errors.NegativityNotFound, errors.EpsilonTooLarge,
                                 errors.ToleranceNotReached, errors.DegreeOverflow])
def test_numerical_errors_exit_3(exc, monkeypatch, capsys):
    def boom(args):
        raise exc("synthetic failure")
    monkeypatch.setitem(cli.COMMANDS, "volume", (boom, "x"))
    assert cli.main(["volume", "--body", "unused.json"]) == 3
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == exc.code and err["type"] == exc.__name__


def test_error_codes_are_distinct():
    classes = [c for c in vars(errors).values() if isinstance(c, type) and issubclass(c, errors.BPError)]
    codes = [c.code for c in classes]
    assert len(codes) == len(set(codes))
    for c in classes:
        if c in (errors.BPError,):
            continue
        assert issubclass(c, (errors.ValidationError, errors.NumericalError))


def test_render_csv_rows():
    rep = bp_compare(Ball(3, 0.4), Ball(3, 0.5), "e", grid=4)
    text = render_report(rep, "csv").decode()
    assert len(text.strip().splitlines()) == 5


def test_render_twice_identical():
    rep = bp_compare(Ball(3, 0.4), Ball(3, 0.5), "h", grid=6)
    for fmt in ("json", "csv", "svg"):
        assert render_report(rep, fmt) == render_report(rep, fmt)
    with pytest.raises(UnsupportedFormat):
        render_report(rep, "png")


def test_canonical_json_format():
    assert canonical_json({"b": 1.0, "a": [np.float64(0.5), 2, True, None]}) == \
        '{"a": [5.000000000000e-01, 2, true, null], "b": 1.000000000000e+00}'


@pytest.mark.slow
def test_counterexample_svg_golden(hyperbolic3):
    svg = render_report(hyperbolic3, "svg").decode()
    assert 'class="rho_K"' in svg and 'class="rho_L"' in svg
    assert 'class="gap"' in svg and 'class="zero"' in svg
    golden = GOLDEN / "hyperbolic3.svg"
    if os.environ.get("BP_UPDATE_GOLDEN"):
        golden.write_text(svg)
    assert svg == golden.read_text()


@pytest.mark.slow
def test_counterexample_json_round_trip(hyperbolic3):
    from bpgeom import body_from_spec
    data = json.loads(render_report(hyperbolic3, "json"))
    assert data["verdict"] == "counterexample"
    # canonical floats carry 13 significant digits, so compare in that representation
    K = body_from_spec(data["K"])
    assert canonical_json(K.to_spec()) == canonical_json(data["K"])
    assert body_from_spec(json.loads(canonical_json(K.to_spec()))).to_spec() == K.to_spec()
