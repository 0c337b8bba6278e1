import io
import json

import pytest

from rzrelax.cli import RunConfig, main
from rzrelax.errors import UsageError
from rzrelax.linalg import matrix_from_json
from rzrelax.moments import moment_table
from rzrelax.pencil import build_pencil
from rzrelax.poly import poly

DISK = "1 - x1^2 - x2^2"
BOX = "(1 - x1)*(1 + x1)*(1 - x2)*(1 + x2)"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv)
    return code, json.loads(out) if out else None, json.loads(err) if err else None


@pytest.fixture(autouse=True)
def _no_env_seed(monkeypatch):
    monkeypatch.delenv("RZ_SEED", raising=False)


def test_rzcheck_passes_on_disk():
    code, rep, _ = run_json("rzcheck", "-p", DISK, "--trials", "64", "--seed", "7")
    assert code == 0 and rep["passed"] and rep["seed"] == 7
    assert rep["quadratic_certificate"]["verdict"] == "PSD"


def test_rzcheck_counterexample():
    code, rep, _ = run_json("rzcheck", "-p", "1 + x1^2")
    assert code == 1 and not rep["passed"]
    assert abs(abs(rep["counterexample"]["root"]["im"]) - 1) < 1e-9


def test_gauge_on_disk():
    code, rep, _ = run_json("gauge", "-p", DISK, "--dir", "3,4", "--relax", "pencil")
    assert code == 0
    assert rep["gauge_C"] == pytest.approx(0.2) and rep["gauge_S"] == pytest.approx(0.2)


def test_gauge_unbounded_is_string():
    code, rep, _ = run_json("gauge", "-p", "1 + x1", "--dir", "1")
    assert code == 0 and rep["gauge_C"] == "inf" and rep["status_C"] == "UNBOUNDED"


def test_gauge_halfspace_and_hierarchy():
    _, rep, _ = run_json("gauge", "-p", "1 + 3*x1", "--dir", "-1", "--relax", "halfspace")
    assert rep["gauge_S"] == pytest.approx(1 / 3)
    _, rep, _ = run_json("gauge", "-p", BOX, "--dir", "1,1", "--relax", "hierarchy",
                         "--level", "3")
    assert rep["gauge_S"] == pytest.approx(1.0, abs=1e-6)


def test_member():
    _, rep, _ = run_json("member", "-p", DISK, "--point", "0.5,0")
    assert rep["in_C"] and rep["in_S"] and rep["point"] == ["1/2", "0"]
    _, rep, _ = run_json("member", "-p", DISK, "--point", "1.1,0")
    assert not rep["in_C"] and rep["verdict_S"] == "NOT_PSD"


def test_moments_table_is_exact():
    code, rep, _ = run_json("moments", "-p", "(1+x1)*(1+2*x1)", "-D", "3")
    assert code == 0
    values = {row["monomial"]: row["value"] for row in rep["moments"]}
    assert values == {"x1": "3", "x1^2": "5", "x1^3": "9"}


def test_pencil_round_trip():
    _, rep, _ = run_json("pencil", "-p", DISK)
    mats = [matrix_from_json(m) for m in rep["pencil"]["coeffs"]]
    ref = build_pencil(moment_table(poly(DISK), 2, 3))
    for A, B in zip(mats, ref.coeffs):
        assert all(a == b for a, b in zip(A.flat, B.flat))
    assert poly(rep["polynomial"]) == poly(DISK)


def test_pencil_variants():
    _, rep, _ = run_json("pencil", "-p", DISK, "--inf")
    assert rep["kind"] == "inf" and rep["pencil"]["size"] == 2
    _, rep, _ = run_json("pencil", "-p", DISK, "--hierarchy", "2")
    assert rep["pencil"]["size"] == 6
    code, _, err = run_json("pencil", "-p", DISK, "--inf", "--hierarchy", "1")
    assert code == 2


def test_halfspace():
    _, rep, _ = run_json("halfspace", "-p", DISK)
    assert rep["full_space"] and rep["c0"] == "2"
    _, rep, _ = run_json("halfspace", "-p", "1 + 3*x1")
    assert rep["c"] == ["3"] and not rep["full_space"]


def test_sweep_csv(tmp_path):
    code, out, _ = run("sweep", "-p", DISK, "--rays", "8", "--format", "csv", "--seed", "3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# rz sweep seed=3")
    assert lines[1] == "ray_index,dir_1,dir_2,gauge_C,gauge_S,ratio"
    assert len(lines) == 10
    for line in lines[2:]:
        row = line.split(",")
        assert float(row[3]) == pytest.approx(float(row[4]), abs=1e-7)


def test_sweep_json_and_determinism():
    a = run("sweep", "-p", BOX, "--rays", "6", "--seed", "11")
    b = run("sweep", "-p", BOX, "--rays", "6", "--seed", "11")
    assert a == b
    rep = json.loads(a[1])
    assert len(rep["rays"]) == 6
    assert all(r["gauge_C"] <= r["gauge_S"] + 1e-7 for r in rep["rays"])


def test_seed_changes_sweep():
    a = run("sweep", "-p", DISK, "--rays", "4", "--seed", "1")[1]
    b = run("sweep", "-p", DISK, "--rays", "4", "--seed", "2")[1]
    assert a != b


def test_hierarchy_command():
    _, rep, _ = run_json("hierarchy", "-p", "(1 - x1)*(1 + x1)", "--max-level", "1",
                         "--rays", "2")
    assert rep["levels"][1]["max_overshoot"] == pytest.approx(0, abs=1e-6)


def test_cone_command():
    code, rep, _ = run_json("cone", "-p", "x1*x2", "-e", "1,1", "--point", "3,5")
    assert code == 0 and rep["hyperbolic"] and rep["in_cone"]
    assert rep["trace"] == pytest.approx(8)
    code, rep, _ = run_json("cone", "-p", "x1^2 + x2^2", "-e", "1,0")
    assert code == 1 and not rep["hyperbolic"]


def test_detrep_command(tmp_path):
    _, rep, _ = run_json("detrep", "-p", DISK, "--kind", "hv2")
    assert rep["residual"] <= 1e-8 and rep["size"] == 2
    path = tmp_path / "mats.json"
    path.write_text(json.dumps(rep["matrices"]))
    _, back, _ = run_json("detrep", "--matrices", str(path))
    assert poly(back["polynomial"]) == poly(DISK)
    _, rep, _ = run_json("detrep", "-p", DISK, "--kind", "lincofactor")
    assert rep["size"] == 3 and rep["residual"] <= 1e-8
    _, rep, _ = run_json("detrep", "--kind", "saunderson", "--size", "2")
    assert len(rep["M"]) == 3 and len(rep["N"][0]) == 2


def test_amalgamate_modes():
    _, rep, _ = run_json("amalgamate", "--mode", "disjoint", "-p", "1 - x1^2",
                         "-q", "1 - x1^2", "-d", "2")
    assert poly(rep["result"]) == poly(DISK)
    _, rep, _ = run_json("amalgamate", "--mode", "quadratic", "-p", DISK, "-q", DISK,
                         "--shared", "1")
    assert poly(rep["result"]) == poly("1 - x1^2 - x2^2 - x3^2")
    code, rep, _ = run_json("amalgamate", "--mode", "deg2", "-p", DISK, "-q", DISK)
    assert code == 0 and rep["rz_probe"] and rep["n_vars"] == 3


def test_tighten(tmp_path):
    anchors = tmp_path / "anchors.csv"
    anchors.write_text("0,0\n0.8,0.8\n-0.8,0.8\n0.8,-0.8\n-0.8,-0.8\n")
    code, rep, _ = run_json("tighten", "-p", BOX, "--anchors", str(anchors), "--rays", "8")
    assert code == 0
    for ray in rep["rays"]:
        assert ray["overshoot_family"] <= ray["overshoot_S"] + 1e-9
        assert ray["overshoot_family"] >= -1e-7
    single = tmp_path / "one.json"
    single.write_text("[[0, 0]]")
    _, rep, _ = run_json("tighten", "-p", BOX, "--anchors", str(single), "--rays", "4")
    assert all(r["gauge_family"] == pytest.approx(r["gauge_S"], abs=1e-8)
               for r in rep["rays"])


def test_tighten_rejects_exterior_anchor(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[[2, 0]]")
    code, _, err = run_json("tighten", "-p", DISK, "--anchors", str(bad))
    assert code != 0 and "error" in err


def test_plot(tmp_path):
    csv_path, svg = tmp_path / "s.csv", tmp_path / "s.svg"
    run("sweep", "-p", DISK, "--rays", "12", "--format", "csv", "-o", str(csv_path))
    code, rep, _ = run_json("plot", str(csv_path), "-o", str(svg))
    assert code == 0 and svg.exists() and rep["rays"] == 12
    empty = tmp_path / "empty.csv"
    empty.write_text("ray_index,dir_1,dir_2,gauge_C,gauge_S,ratio\n")
    code, _, err = run_json("plot", str(empty), "-o", str(svg))
    assert code == 2 and err["error"]["code"]


def test_usage_errors():
    code, _, err = run_json("frobnicate")
    assert code == 2 and "message" in err["error"]
    code, _, err = run_json("rzcheck", "-p", "1 +")
    assert code == 2
    code, _, _ = run_json()
    assert code == 2


def test_seed_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 5}))
    monkeypatch.setenv("RZ_SEED", "9")
    assert run_json("halfspace", "-p", DISK)[1]["seed"] == 9
    assert run_json("halfspace", "-p", DISK, "--config", str(cfg))[1]["seed"] == 5
    assert run_json("--seed", "4", "halfspace", "-p", DISK, "--config", str(cfg))[1]["seed"] == 4


def test_config_validation(tmp_path):
    with pytest.raises(UsageError):
        RunConfig(psd_tol=0).validate()
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": "red"}))
    code, _, _ = run_json("halfspace", "-p", DISK, "--config", str(bad))
    assert code == 2


def test_capacity_error_exit_code():
    code, _, err = run_json("moments", "-p", DISK, "-D", "40")
    assert code != 0 and err["error"]["code"]


def test_rzcheck_strict_quadratic():
    code, rep, _ = run_json("rzcheck", "-p", "(1 + x1)^2", "--strict-quadratic")
    assert code == 0 and rep["method"] == "exact-quadratic"
    code, rep, _ = run_json("rzcheck", "-p", "1 + x1^2 + x2", "--strict-quadratic")
    assert code == 1 and not rep["passed"]
