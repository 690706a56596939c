import csv
import io
import json
import math
from pathlib import Path

import pytest

from torusteich.cli import main, parse_complex, parse_foliation, parse_matrix, UsageError

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def table(text, delim):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    header = {ln[2:].split("=", 1)[0]: ln[2:].split("=", 1)[1] for ln in text.splitlines() if ln.startswith("# ")}
    return header, list(csv.DictReader(io.StringIO("\n".join(lines)), delimiter=delim))


# argument parsing


@pytest.mark.parametrize(
    "text, value",
    [("i", 1j), ("2i", 2j), ("2j", 2j), ("-i", -1j), ("1+i", 1 + 1j), ("0.5-0.25i", 0.5 - 0.25j), ("3", 3), ("1e2+1e-1i", 100 + 0.1j)],
)
def test_parse_complex(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("text", ["", "+", "i2", "2+3", "1+2i3", "1 2i", "abc"])
def test_parse_complex_rejects(text):
    with pytest.raises(UsageError, match="position"):
        parse_complex(text)


def test_parse_foliation_forms():
    assert parse_foliation("1,0") == parse_foliation("slope:1/0")
    f = parse_foliation("t:0")
    assert f.boundary == 0
    u = parse_foliation("unstable:2,1,1,1")
    assert u.boundary == pytest.approx((1 + 5**0.5) / 2)
    with pytest.raises(UsageError):
        parse_foliation("1,2,3")


def test_parse_matrix_reports_entry():
    assert parse_matrix("2,1,1,1").entries == (2, 1, 1, 1)
    with pytest.raises(UsageError, match="position 5"):
        parse_matrix("2,1,x,1")
    with pytest.raises((UsageError, ValueError)):
        parse_matrix("2,1,1,2")


# commands


def test_ext(capsys):
    code, doc = run_json(capsys, "ext", "--tau", "2i", "--foliation", "0,1")
    assert code == 0 and doc["schema"] == 1 and doc["command"] == "ext"
    assert doc["ext"] == pytest.approx(2.0)
    assert doc["config"]["tau"] == "2i"
    # slope 1/1 is the foliation [-1, 1]; [1, 1] has length 5 at 1+i
    _, doc = run_json(capsys, "ext", "--tau", "1+i", "--slope", "1/1")
    assert doc["ext"] == pytest.approx(1.0)
    _, doc = run_json(capsys, "ext", "--tau", "1+i", "--foliation", "1,1")
    assert doc["ext"] == pytest.approx(5.0)


def test_dist_and_ray(capsys):
    _, doc = run_json(capsys, "dist", "--a", "i", "--b", "2i")
    assert doc["distance"] == pytest.approx(0.5 * math.log(2))
    code, out, _ = run(capsys, "ray", "--dir", "inf", "--s", "0", "--s", "1", "--format", "csv")
    assert code == 0
    _, rows = table(out, ",")
    assert len(rows) == 2


def test_classify(capsys):
    _, doc = run_json(capsys, "classify", "--matrix", "2,1,1,1")
    assert doc["kind"] == "pseudo-anosov"
    assert doc["K"] == pytest.approx((3 + 5**0.5) / 2, abs=1e-12)
    _, doc = run_json(capsys, "classify", "--matrix", "1,1,0,1")
    assert doc["kind"] == "reducible"


def test_ball_and_budget(capsys):
    _, doc = run_json(capsys, "ball", "--gen", "1,2,0,1", "--gen", "1,0,2,1", "--depth", "3")
    assert doc["size"] == 53
    code, out, err = run(capsys, "ball", "--gen", "1,2,0,1", "--gen", "1,0,2,1", "--depth", "9", "--budget", "100")
    assert code == 3 and "budget" in err.lower()


def test_mcp(capsys):
    _, doc = run_json(capsys, "mcp", "--gen", "1,1,0,1", "--gen", "1,0,1,1", "--depth", "2")
    assert doc["verdict"] == "sufficiently-large"


def test_track_fixture_and_file(capsys):
    _, doc = run_json(capsys, "track", "--fixture", "torus")
    assert doc["kernel_dim"] == 2
    assert doc["form_matrix"] == [[0, 1], [-1, 0]]
    _, doc2 = run_json(capsys, "track", "--file", str(DATA / "theta.track"))
    assert doc2["kernel_dim"] == 2 and doc2["recurrent"] is True
    assert doc2["certificate"] == [2, 1, 1]
    code, _, err = run(capsys, "track", "--file", str(DATA / "missing.track"))
    assert code == 64


def test_track_parse_error_position(capsys, tmp_path):
    bad = tmp_path / "bad.track"
    bad.write_text("branches a\nswitch v: a:in a:sideways\n")
    code, _, err = run(capsys, "track", "--file", str(bad))
    assert code == 64 and "line 2, column 16" in err


def test_cone_quadrature_and_montecarlo(capsys):
    _, doc = run_json(capsys, "cone", "--tau", "i")
    assert doc["value"] == pytest.approx(math.pi / 4, abs=1e-10)
    _, doc = run_json(capsys, "cone", "--tau", "i", "--arc", "theta:0,pi/2")
    assert doc["value"] == pytest.approx(math.pi / 8, abs=1e-10)
    _, mc = run_json(capsys, "cone", "--tau", "i", "--montecarlo", "--samples", "20000", "--seed", "5")
    assert abs(mc["value"] - math.pi / 4) < 5 * mc["abs_error_estimate"]
    assert mc["config"]["seed"] == 5


def test_measure_check(capsys):
    _, doc = run_json(capsys, "measure-check", "--tau", "0.5+i", "--arc", "t:-1,2", "--matrix", "2,1,1,1", "--tau2", "2i")
    for key in ("identity_residual", "equivariance_residual", "radon_nikodym_residual"):
        assert doc[key] < 1e-7


def test_kernel_tsv_columns(capsys):
    code, out, _ = run(capsys, "kernel", "--tau", "2i", "--samples", "16", "--format", "tsv")
    assert code == 0
    header, rows = table(out, "\t")
    assert header["tau"] == "2i" and header["command"] == "kernel"
    assert list(rows[0]) == ["theta", "t", "P"]
    thetas = [float(r["theta"]) for r in rows]
    assert all(a < b for a, b in zip(thetas, thetas[1:]))
    assert rows[0]["t"] == "inf"
    for r in rows:
        t = float(r["t"])
        expected = 2.0 if math.isinf(t) else 2 * (1 + t * t) / (t * t + 4)
        assert float(r["P"]) == pytest.approx(expected, rel=1e-12)


def test_poisson_and_radial(capsys):
    _, doc = run_json(capsys, "poisson", "--func", "bump", "--tau", "i", "--tau", "2i")
    vals = [r["value"] for r in doc["rows"]]
    assert vals == pytest.approx([0.5, 1 / 3], abs=1e-10)
    _, doc = run_json(capsys, "poisson", "--indicator", "t:-1,1", "--tau", "i")
    assert doc["rows"][0]["value"] == pytest.approx(0.5, abs=1e-14)
    _, doc = run_json(capsys, "radial", "--func", "bump", "--t0", "0")
    assert abs(doc["tail"] - 1) < 1e-3


def test_harmonic_checks(capsys):
    _, doc = run_json(capsys, "laplacian", "--func", "gauss", "--tau", "0.5+i", "--h", "0.1")
    assert doc["residual"] < 1e-2
    _, doc = run_json(capsys, "fourier", "--func", "cos2theta", "--N", "3")
    assert doc["residual"] == pytest.approx(0.5, abs=1e-9)
    _, doc = run_json(capsys, "cr", "--func", "exp_it")
    assert doc["residual"] < 1e-5


def test_seidel(capsys):
    _, doc = run_json(capsys, "seidel", "--period", "2", "--pattern", "0,1", "--tau", "0.5+0.1i", "--tau", "2.5+0.1i")
    v = [r["value"] for r in doc["rows"]]
    assert v[0] == pytest.approx(v[1], abs=1e-12)
    assert doc["invariance_residual"] < 1e-7 and doc["oscillation"] > 0.1


def test_limitset_and_horo(capsys):
    _, doc = run_json(capsys, "limitset", "--gen", "2,1,1,1", "--depth", "3")
    assert [r["t"] for r in doc["rows"]] == pytest.approx(sorted([(1 - 5**0.5) / 2, (1 + 5**0.5) / 2]))
    code, doc = run_json(
        capsys, "horo", "small", "--gen", "2,1,1,1", "--foliation", "unstable:2,1,1,1", "--eps", "1e-4", "--depth", "8"
    )
    assert code == 0 and doc["status"] == "witness"
    code, doc = run_json(capsys, "horo", "big", "--gen", "1,1,0,1", "--foliation", "t:0", "--M", "10", "--D", "3", "--depth", "6")
    assert code == 2 and doc["status"] == "inconclusive"
    code, doc = run_json(capsys, "horo", "conical", "--gen", "2,1,1,1", "--foliation", "unstable:2,1,1,1", "--R", "2", "--depth", "6")
    assert code == 0 and doc["status"] == "witness"


def test_psum_and_wander(capsys):
    _, doc = run_json(capsys, "psum", "--gen", "2,1,1,1", "--foliation", "0.3,1", "--depth", "3")
    sums = [r["partial_sum"] for r in doc["rows"]]
    assert all(a <= b for a, b in zip(sums, sums[1:]))
    _, doc = run_json(capsys, "wander", "--gen", "0,-1,1,0", "--gen", "1,1,0,1", "--arc", "t:-1,1", "--depth", "4")
    assert doc["max_overlap"] > 0


# exit codes and output discipline


@pytest.mark.parametrize(
    "argv",
    [
        ["ext", "--tau", "-i", "--foliation", "1,0"],
        ["ext", "--tau=-i", "--foliation", "1,0"],
        ["ext", "--tau", "i"],
        ["classify", "--matrix", "1,2,3"],
        ["nosuch"],
        ["kernel", "--tau", "i", "--samples", "0"],
        ["ball", "--depth", "2"],
        ["poisson", "--func", "nope", "--tau", "i"],
    ],
)
def test_usage_errors_exit_64(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 64 and out == "" and err


def test_output_is_deterministic(capsys):
    argv = ["cone", "--tau", "0.3+1.2i", "--montecarlo", "--samples", "5000", "--seed", "9"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    argv = ["limitset", "--gen", "1,1,0,1", "--gen", "1,0,1,1", "--depth", "4", "--format", "csv"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_csv_and_json_agree(capsys):
    argv = ["kernel", "--tau", "0.5+i", "--samples", "8"]
    _, doc = run_json(capsys, *argv)
    _, out, _ = run(capsys, *argv, "--format", "csv")
    header, rows = table(out, ",")
    assert header["tau"] == doc["config"]["tau"]
    for j, r in zip(doc["rows"], rows):
        for k in ("theta", "t", "P"):
            assert float(r[k]) == float(j[k])


def test_scalar_csv_layout(capsys):
    _, out, _ = run(capsys, "dist", "--a", "i", "--b", "2i", "--format", "csv")
    header, rows = table(out, ",")
    assert header["schema"] == "1" and header["a"] == "i"
    assert float(rows[0]["distance"]) == pytest.approx(0.5 * math.log(2))


def test_out_file(capsys, tmp_path):
    target = tmp_path / "ext.json"
    code, out, _ = run(capsys, "ext", "--tau", "i", "--foliation", "1,0", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["ext"] == 1.0
