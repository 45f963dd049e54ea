import csv
import io
import json
import os

import numpy as np
import pytest

from latticecalc import cli as cli_mod


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_heat_kernel_mass(cli):
    res = cli("kernel", "heat", "--t", 1, "--tol", "1e-10", "--format", "csv")
    assert res.exit_code == 0
    table = rows(res.stdout)
    assert list(table[0]) == ["param", "kind", "j", "value", "tail_bound"]
    mass = sum(float(r["value"]) for r in table)
    assert abs(mass - 1.0) <= 1e-10
    assert all(float(r["tail_bound"]) <= 1e-10 for r in table)
    assert "tol = 1e-10" in res.stderr


def test_stencil_kernel(cli):
    res = cli("kernel", "frac-pos", "--beta", 1, "--range", 5)
    values = [float(r["value"]) for r in rows(res.stdout)]
    assert values == [0, 0, 0, 0, -1, 2, -1, 0, 0, 0, 0]


def test_poisson_svg(cli, tmp_path):
    out = tmp_path / "p.svg"
    res = cli("kernel", "poisson", "--y", 2, "--tol", "1e-8", "--format", "svg", "--out", out)
    assert res.exit_code == 0
    text = out.read_text()
    assert text.startswith("<svg") and "log scale" in text and "<metadata>" in text
    assert "href" not in text  # self-contained
    assert (tmp_path / "p.svg.cfg").exists()


def test_kernel_json(cli):
    res = cli("kernel", "bessel-potential", "--beta", 0.6, "--range", 4, "--format", "json")
    payload = json.loads(res.stdout)
    assert payload["schema"] == "v1" and len(payload["rows"]) == 9


def test_missing_parameter_is_domain_error(cli):
    res = cli("kernel", "heat")
    assert res.exit_code == 2
    assert "--t" in res.stderr


def test_negative_time_is_domain_error(cli):
    assert cli("kernel", "heat", "--t", -1).exit_code == 2


def test_accuracy_error_exit_code(cli):
    res = cli("apply", "heat", "--f", "abs_pow:0.5", "--t", 1, "--tol", "1e-20")
    assert res.exit_code == 3


def test_apply_heat_symmetric(cli):
    res = cli("apply", "heat", "--f", "abs_pow:0.5", "--t", 10, "--window", 32)
    assert res.exit_code == 0
    data = np.array([[float(r["n"]), float(r["value"]), float(r["error_bound"])] for r in rows(res.stdout)])
    assert np.all(np.isfinite(data))
    np.testing.assert_allclose(data[:, 1], data[::-1, 1], rtol=1e-13)


def test_apply_negative_power_on_constant(cli):
    res = cli("apply", "frac-neg", "--f", "constant", "--beta", 0.25)
    assert res.exit_code == 2
    assert "l_-beta" in res.stderr


def test_semigroup_route_matches_kernel_route(cli):
    common = ("apply", "frac-pos", "--f", "abs_pow:0.8", "--beta", 0.25, "--window", 64, "--support", 256)
    a = rows(cli(*common).stdout)
    b = rows(cli(*common, "--route", "semigroup").stdout)
    diff = max(abs(float(x["value"]) - float(y["value"])) for x, y in zip(a, b))
    assert diff <= 1e-5


def test_semigroup_route_restricted(cli):
    assert cli("apply", "heat", "--f", "constant", "--t", 1, "--route", "semigroup").exit_code == 2


def test_output_is_deterministic_and_config_replays(cli, tmp_path):
    first = tmp_path / "a.csv"
    cli("apply", "poisson", "--f", "abs_pow:0.7", "--y", 3, "--window", 6, "--out", first)
    second = tmp_path / "b.csv"
    res = cli("apply", "--config", f"{first}.cfg", "--out", second)
    assert res.exit_code == 0
    assert first.read_bytes() == second.read_bytes()


def test_flags_override_config(cli, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sample\nt = 2.0\nwindow = 1\nf = constant\n")
    res = cli("apply", "heat", "--config", cfg, "--window", 2)
    assert len(rows(res.stdout)) == 5
    assert "t = 2.0" in res.stderr


def test_config_parser(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("a = 1\nb = 2.5  # comment\nsup-window = 8\nname = abs_pow:0.5\n")
    assert cli_mod.read_config(cfg) == {"a": 1, "b": 2.5, "sup_window": 8, "name": "abs_pow:0.5"}
    bad = tmp_path / "bad.cfg"
    bad.write_text("no equals sign\n")
    with pytest.raises(cli_mod.DomainError):
        cli_mod.read_config(bad)


def test_atomic_write_leaves_no_temporaries(tmp_path):
    target = tmp_path / "sub" / "x.txt"
    cli_mod.write_atomic(str(target), "hello\n")
    cli_mod.write_atomic(str(target), "again\n")
    assert target.read_text() == "again\n"
    assert os.listdir(target.parent) == ["x.txt"]


def test_classify_square_root(cli):
    res = cli("classify", "--f", "abs_pow:0.5")
    assert res.exit_code == 0
    report = json.loads(res.stdout)
    assert report["verdict"] == "consistent"
    assert all(0.4 <= v <= 0.6 for v in report["estimates"].values())


def test_verify_subset_writes_report(cli, tmp_path):
    out = tmp_path / "rep.json"
    res = cli("verify", "--lemmas", "kernelest,Poissonest", "--report", out)
    assert res.exit_code == 0
    report = json.loads(out.read_text())
    assert report["schema"].endswith("v1")
    assert set(report["lemmas"]) == {"kernelest", "Poissonest"}
    assert "PASS kernelest" in res.stderr


def test_verify_unknown_lemma(cli):
    assert cli("verify", "--lemmas", "nope").exit_code == 2


def test_module_entry_point(cli_process):
    res = cli_process("kernel", "frac-pos", "--beta", 2, "--range", 2)
    assert res.returncode == 0
    assert [float(r["value"]) for r in rows(res.stdout)] == [1, -4, 6, -4, 1]


def test_poisson_without_declared_tail_reports_accuracy(cli):
    # bounded functions with no declared tail get a 1/J envelope, far above 1e-8
    res = cli("apply", "poisson", "--f", "rademacher:5", "--y", 3, "--window", 2)
    assert res.exit_code == 3
    ok = cli("apply", "poisson", "--f", "rademacher:5", "--y", 3, "--window", 2, "--tol", "1e-2")
    assert ok.exit_code == 0
