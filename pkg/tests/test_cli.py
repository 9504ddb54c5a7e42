import json

import pytest

from momentshape.cli import dispatch


def run(args, capsys):
    code = dispatch(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_moments_and_reconstruct(tmp_path, capsys):
    spec = write(tmp_path / "disk.json", {"kind": "disk", "center": [0.2, 0.1], "radius": 0.5})
    m = tmp_path / "m.json"
    assert run(["moments", "--spec", spec, "--d", "3", "-o", str(m)], capsys)[0] == 0
    assert json.loads(m.read_text())["d"] == 3
    code, out, _ = run(["reconstruct", "--input", str(m), "--boundary", str(tmp_path / "b.csv")], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["degree"] == 1
    assert rep["nodes"][0] == pytest.approx([0.2, 0.1], abs=1e-10)
    assert (tmp_path / "b.csv").read_text().startswith("x,y,Q\n")


def test_exptransform_both_ways(tmp_path, capsys):
    t = write(tmp_path / "s.json", {"type": "moments1d", "s": [1, 0.5, 1 / 3]})
    code, out, _ = run(["exptransform", "--input", t], capsys)
    assert code == 0 and json.loads(out)["t"] == pytest.approx([1, 0, 0], abs=1e-12)


def test_markov1d(tmp_path, capsys):
    spec = write(tmp_path / "iv.json", {"kind": "intervals", "intervals": [[-0.8, -0.3], [0.1, 0.6]]})
    code, out, _ = run(["markov1d", "--input", spec], capsys)
    assert code == 0
    flat = [x for iv in json.loads(out)["intervals"] for x in iv]
    assert flat == pytest.approx([-0.8, -0.3, 0.1, 0.6], abs=1e-9)


def test_volume_csv(tmp_path, capsys):
    poly = write(tmp_path / "p.json", {"n": 1, "terms": [{"alpha": [1], "coeff": 1.0}]})
    out = tmp_path / "v.csv"
    args = ["--seed", "7", "volume", "--poly", poly, "--delta-grid", "1e-2,1e-3", "--samples", "50000", "-o", str(out)]
    assert run(args, capsys)[0] == 0
    first = out.read_text()
    assert first.splitlines()[0] == "delta,volume,stderr,ratio,ratio_stderr"
    run(args, capsys)
    assert out.read_text() == first


def test_stability(tmp_path, capsys):
    conf = write(
        tmp_path / "c.json",
        {"experiments": [
            {"type": "holder", "shape": "orthant", "family": "translation", "eps_grid": [0.1, 0.01]},
            {"type": "two_domains", "spec1": {"kind": "disk", "radius": 0.4},
             "spec2": {"kind": "disk", "radius": 0.5}, "grid_n": 64},
        ]},
    )
    summary = tmp_path / "s.json"
    code, out, _ = run(["stability", "--config", conf, "--summary", str(summary)], capsys)
    assert code == 0
    assert out.splitlines()[0].startswith("id,type,param")
    s = json.loads(summary.read_text())
    assert s["exp0"]["bounded"] and s["exp1"]["left"] == pytest.approx(0.09)


def test_selftest_deterministic(capsys):
    code, first, _ = run(["selftest"], capsys)
    assert code == 0 and "FAIL" not in first
    assert run(["selftest"], capsys)[1] == first


def test_usage_errors(tmp_path, capsys):
    assert run(["bogus"], capsys)[0] == 2
    assert run([], capsys)[0] == 2
    assert run(["moments", "--d", "2"], capsys)[0] == 2
    assert run(["moments", "--spec", str(tmp_path / "nope.json"), "--d", "2"], capsys)[0] == 2
    assert run(["--tol", "-1", "selftest"], capsys)[0] == 2


def test_validation_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": ')
    code, _, err = run(["moments", "--spec", str(bad), "--d", "2"], capsys)
    assert code == 1 and "line 1" in err
    spec = write(tmp_path / "d.json", {"kind": "disk", "radius": 0})
    assert run(["moments", "--spec", spec, "--d", "2"], capsys)[0] == 1
