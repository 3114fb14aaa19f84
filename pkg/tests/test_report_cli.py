import json
import math
import re
import subprocess
import sys

import numpy as np
import pytest

from etroots import cli
from etroots.lemmas import LemmaCheckResult
from etroots.poly import FamilySpec, NonnegativityWarning, Polynomial, family, read_coeffs, write_coeffs
from etroots.report import AnalysisConfig, analyze, coeff_hash, dumps
from etroots.rootfind import reconstruct_coeffs

TWO_PI = 2 * math.pi


def run(*argv):
    return cli.main([str(a) for a in argv])


def analyze_family(tmp_path, name, n, *extra):
    out = tmp_path / f"{name}{n}.json"
    assert run("analyze", "--family", name, "--n", n, *extra, "--out", out) == 0
    return json.loads(out.read_text())


def unity_file(tmp_path, n=100):
    path = tmp_path / "unity.json"
    write_coeffs(Polynomial([-1] + [0] * (n - 1) + [1]), path)
    return path


def svg_root_angles(svg):
    pts = re.findall(r'class="root" cx="([-\d.]+)" cy="([-\d.]+)"', svg)
    return sorted(math.degrees(math.atan2(240 - float(y), float(x) - 240)) % 360 for x, y in pts)


# ------------------------------------------------------------------ analyze

def test_fejer_report(tmp_path):
    d = analyze_family(tmp_path, "fejer", 50)
    assert d["status"] == "ok"
    assert d["trig"]["X"] == 50 and d["trig"]["tangential"] == 50
    assert d["clusters"][0]["alpha"] == 0.5 and d["clusters"][0]["I"] == 0
    assert d["min_modulus"] >= 1 - 1e-8
    assert d["inside_root_count"] == 0
    assert d["bound_holds"] and d["discrepancy"] <= d["et_bound"]
    assert d["input"]["family"] == "fejer(n=50)" or "fejer" in d["input"]["family"]
    assert d["h"]["error_estimate"] >= 0 and d["log_integral"]["nodes_used"] > 0


def test_young_report(tmp_path):
    d = analyze_family(tmp_path, "young", 50)
    assert d["trig"]["X"] == 0
    ref = TWO_PI * math.log(50)
    assert ref / 3 <= d["log_integral"]["value"] <= 3 * ref


def test_roots_of_unity_report(tmp_path):
    out = tmp_path / "r.json"
    assert run("analyze", "--coeffs", unity_file(tmp_path), "--out", out) == 0
    d = json.loads(out.read_text())
    assert d["discrepancy"] == pytest.approx(0.01, abs=1e-10)
    assert [c["I"] for c in d["clusters"]] == [0, 0, 0]
    assert [c["alpha"] for c in d["clusters"]] == [0.5, 0.75, 0.9]


def test_report_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert run("analyze", "--family", "poisson", "--n", 30, "--seed", 5, "--out", out) == 0
    assert a.read_bytes() == b.read_bytes()
    assert "timings" not in json.loads(a.read_text())


def test_timings_are_opt_in(tmp_path):
    d = analyze_family(tmp_path, "fejer", 10, "--timings")
    assert set(d["timings"]) >= {"find_roots", "h_measure", "log_abs_integral", "count_real_roots"}


def test_round_trip_through_echoed_coefficients(tmp_path):
    rng = np.random.default_rng(3)
    src = tmp_path / "c.json"
    write_coeffs(Polynomial(rng.normal(size=26) + 1j * rng.normal(size=26)), src)
    first, second = tmp_path / "1.json", tmp_path / "2.json"
    assert run("analyze", "--coeffs", src, "--out", first) == 0
    echoed = tmp_path / "echo.json"
    echoed.write_text(json.dumps(json.loads(first.read_text())["input"]["coefficients"]))
    assert run("analyze", "--coeffs", echoed, "--out", second) == 0
    assert first.read_text() == second.read_text()


def test_report_echoes_input_and_config():
    p = Polynomial([2, 0, 4j])
    rep = analyze(p, AnalysisConfig(alphas=(0.5,), factor=3.0))
    d = rep.to_dict()
    assert d["input"]["sha256"] == coeff_hash(p.coeffs)
    assert d["input"]["scale"] == 4.0
    assert d["config"]["alphas"] == [0.5] and d["config"]["factor"] == 3.0
    assert len(d["roots"]["values"]) == 2 and len(d["roots"]["residuals"]) == 2


def test_census_tables_sum_to_n(tmp_path):
    rng = np.random.default_rng(11)
    background = np.exp(1j * rng.uniform(0, TWO_PI, 52)) * rng.choice([0.9, 1.1], 52)
    z = np.concatenate([0.3 * np.exp(1j * np.linspace(0.96, 1.04, 8)), background])
    rep = analyze(Polynomial(reconstruct_coeffs(z, 1.0)), AnalysisConfig(alphas=(0.5,)))
    assert rep.status == "ok"
    c = rep.clusters[0]
    assert c["I"] >= 1
    for cen, J in zip(c["census"], c["chosen_intervals"]):
        assert cen["A1"] + cen["A2"] + cen["A3"] + cen["B1"] + cen["B2"] == 60
        assert cen["dense"]


def test_uncertified_roots_give_advisory(tmp_path):
    d = analyze_family(tmp_path, "fejer", 10, "--tol", "1e-30")
    assert d["status"] == "advisory"
    assert any("uncertified" in n for n in d["notes"])


def test_rotated_family_records_interpretation(tmp_path):
    d = analyze_family(tmp_path, "fejer", 20, "--add-rotated", 1.0)
    assert any("1 + exp(i k angle)" in n for n in d["notes"])


def test_dumps_keeps_17_digits():
    text = dumps({"x": 0.1, "y": [1.0, 2], "z": None, "w": float("inf")})
    assert json.loads(text) == {"x": 0.1, "y": [1.0, 2], "z": None, "w": "inf"}
    assert "0.10000000000000001" in text


# ---------------------------------------------------------------- exit codes

@pytest.mark.parametrize("argv", [
    ["analyze", "--out", "x.json"],
    ["analyze", "--family", "fejer", "--out", "x.json"],
    ["analyze", "--family", "fejer", "--n", "5", "--alpha", "2", "--out", "x.json"],
    ["analyze", "--family", "poisson", "--n", "5", "--rho", "1.5", "--out", "x.json"],
    ["analyze", "--coeffs", "/nonexistent/file.json", "--out", "x.json"],
    ["family", "--name", "nosuch", "--n", "3", "--out", "x.json"],
    ["bogus"],
])
def test_input_errors_exit_2(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert cli.main(argv) == 2


def test_degree_zero_names_the_stage(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text("[[1, 0]]")
    assert run("analyze", "--coeffs", path, "--out", tmp_path / "o.json") == 2
    assert "normalize" in capsys.readouterr().err


def test_malformed_coefficient_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text("{not json")
    assert run("analyze", "--coeffs", path, "--out", tmp_path / "o.json") == 2


def test_failed_check_exits_1(monkeypatch, capsys):
    bad = LemmaCheckResult("forced", 1.0, 1, False, (), 0.0)
    monkeypatch.setattr(cli, "verify_all", lambda **kw: [bad])
    assert run("verify") == 1
    assert "FAIL" in capsys.readouterr().out


# -------------------------------------------------------------------- verify

@pytest.mark.parametrize("seed", [0, 7])
def test_verify_passes_for_two_seeds(seed, tmp_path, capsys):
    out = tmp_path / "v.json"
    assert run("verify", "--seed", seed, "--json", out) == 0
    rows = json.loads(out.read_text())
    assert rows and all(r["pass"] for r in rows)
    assert {"finite_difference", "drop_grid", "jensen_random", "discrepancy_bound"} <= {r["name"] for r in rows}
    assert "PASS" in capsys.readouterr().out


def test_tight_tolerance_reports_unconverged():
    from etroots.checks import jensen_runs
    loose = jensen_runs(seed=0, rtol=1e-14)
    strict = jensen_runs(seed=0, rtol=1e-14, strict=True)
    assert loose.detail["unconverged"] > 0
    assert loose.passed and not strict.passed


# ---------------------------------------------------------------------- plot

def test_plot_z4_plus_1(tmp_path):
    roots = tmp_path / "roots.txt"
    report = tmp_path / "r.json"
    src = tmp_path / "c.json"
    write_coeffs(Polynomial([1, 0, 0, 0, 1]), src)
    assert run("analyze", "--coeffs", src, "--roots-out", roots, "--out", report) == 0
    for inp in (roots, report):
        svg_path = tmp_path / "p.svg"
        assert run("plot", "--in", inp, "--out", svg_path) == 0
        svg = svg_path.read_text()
        assert svg_root_angles(svg) == pytest.approx([45, 135, 225, 315], abs=0.01)
        assert "n = 4" in svg and "<circle" in svg


def test_plot_carries_family_label(tmp_path):
    analyze_family(tmp_path, "fejer", 20)
    out = tmp_path / "f.svg"
    assert run("plot", "--in", tmp_path / "fejer20.json", "--out", out) == 0
    svg = out.read_text()
    assert "fejer" in svg and len(svg_root_angles(svg)) == 20


# -------------------------------------------------------------------- family

def test_family_command(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("family", "--name", "fejer", "--n", 1, "--out", a) == 0
    assert run("family", "--name", "fejer", "--n", 1, "--raw", "--out", b) == 0
    assert read_coeffs(a).coeffs.tolist() == [1, 1]
    assert read_coeffs(b).coeffs.tolist() == [2, 2]


def test_family_poisson_default_rho(tmp_path):
    out = tmp_path / "p.json"
    assert run("family", "--name", "poisson", "--n", 8, "--out", out) == 0
    with pytest.warns(NonnegativityWarning):
        expected = family(FamilySpec("poisson", 8, 0.9))
    np.testing.assert_allclose(read_coeffs(out).coeffs, expected.coeffs)


def test_module_entry_point(tmp_path):
    out = tmp_path / "y.json"
    res = subprocess.run([sys.executable, "-m", "etroots", "family", "--name", "young", "--n", "2",
                          "--out", str(out)], capture_output=True, text=True)
    assert res.returncode == 0
    assert read_coeffs(out).coeffs.tolist() == [2, 2, 1]
