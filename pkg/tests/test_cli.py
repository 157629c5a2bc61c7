"""Batch front-end: exit codes, output formats, determinism."""

import json
import subprocess
import sys

from qdisc.cli import main


def run_cli(args):
    import io
    from contextlib import redirect_stdout

    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(args)
    return code, buf.getvalue()


def test_usage_error_bad_q():
    code, _ = run_cli(["verify", "--q", "1.2"])
    assert code == 2


def test_usage_error_bad_command():
    assert main(["frobnicate"]) == 2


def test_usage_error_bad_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    code, _ = run_cli(["verify", "--q", "0.5", "--config", str(cfg)])
    assert code == 2
    code, _ = run_cli(["verify", "--q", "0.5", "--config", str(tmp_path / "missing.json")])
    assert code == 3


def test_io_error_unwritable():
    code, _ = run_cli(["tabulate", "--q", "0.5", "--out", "/nonexistent/dir/table.csv"])
    assert code == 3


def test_verify_subset_passes(tmp_path):
    out = tmp_path / "report.json"
    code, _ = run_cli(
        ["verify", "--q", "0.5", "--checks", "algebra,casimir", "--out", str(out)]
    )
    assert code == 0
    report = json.loads(out.read_text())
    assert report["passed"] is True
    names = [c["check"] for c in report["checks"]]
    assert "casimir_equals_laplacian" in names
    for c in report["checks"]:
        assert set(c) == {"check", "residual", "tolerance", "pass", "detail", "runtime_s"}
        assert c["pass"] is True
    cas = next(c for c in report["checks"] if c["check"] == "casimir_equals_laplacian")
    assert cas["residual"] < 1e-12


def test_tabulate_header_and_centre_value(tmp_path):
    out = tmp_path / "table.csv"
    code, _ = run_cli(["tabulate", "--q", "0.5", "--nmax", "8", "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "n,y,g1,g2"
    row0 = lines[1].split(",")
    assert row0[0] == "0" and float(row0[1]) == 1.0
    # centre value of the first solution from an independent coefficient sum
    q2 = 0.25
    total = sum((1 / q2 - 1) / (q2**-m - 1) for m in range(1, 200))
    assert abs(float(row0[2]) + (1 - q2) * total) < 1e-12


def test_tabulate_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_cli(["tabulate", "--q", "0.5", "--nmax", "12", "--out", str(a)])
    run_cli(["tabulate", "--q", "0.5", "--nmax", "12", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_transform_default_input(tmp_path):
    out = tmp_path / "spec.csv"
    code, _ = run_cli(["transform", "--q", "0.5", "--nodes", "16", "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "rho,density,fhat_re,fhat_im"
    assert len(lines) == 17
    # centre delta transforms to the constant 1 - q^2
    for line in lines[1:]:
        parts = line.split(",")
        assert abs(float(parts[2]) - 0.75) < 1e-12
        assert abs(float(parts[3])) < 1e-12


def test_transform_with_input_file(tmp_path):
    element = {"q": 0.5, "sectors": [{"m": 0, "values": [[1, 2.0, 0.0]]}]}
    path = tmp_path / "el.json"
    path.write_text(json.dumps(element))
    out = tmp_path / "spec.json"
    code, _ = run_cli(
        ["transform", "--q", "0.5", "--nodes", "8", "--input", str(path),
         "--out", str(out), "--format", "json"]
    )
    assert code == 0
    rows = json.loads(out.read_text())
    assert len(rows) == 8
    assert {"rho", "density", "fhat_re", "fhat_im"} == set(rows[0])


def test_greens_outputs(tmp_path):
    out = tmp_path / "coef.csv"
    code, _ = run_cli(["greens", "--q", "0.5", "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "m,coef_order1,coef_order2_direct,coef_order2_log"
    first = lines[1].split(",")
    assert float(first[1]) == -1.0
    sol = json.loads((tmp_path / "coef.csv.solution1.json").read_text())
    assert sol["q"] == 0.5
    assert sol["sectors"][0]["m"] == 0


def test_limit_rows(tmp_path):
    out = tmp_path / "limit.csv"
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"t_list": [0.0, 0.5], "q_list": [0.9, 0.99]}))
    code, _ = run_cli(
        ["limit", "--q", "0.5", "--config", str(cfg), "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "q,t,err_order1,err_order2,reflection_residual"
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 4
    t0 = [r for r in rows if float(r[1]) == 0.0]
    for r in t0:
        assert float(r[2]) == 0.0 and float(r[3]) == 0.0
    # error shrinks along the q list at t = 0.5
    at_half = {float(r[0]): float(r[2]) for r in rows if float(r[1]) == 0.5}
    assert at_half[0.99] < at_half[0.9]
    for r in rows:
        assert float(r[4]) < 1e-12


def test_config_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"q": 0.3, "nmax": 3}))
    out = tmp_path / "t.csv"
    code, _ = run_cli(["tabulate", "--q", "0.5", "--config", str(cfg), "--out", str(out)])
    assert code == 0
    # flag wins over config: the y column reflects q = 0.5
    second = out.read_text().strip().split("\n")[2].split(",")
    assert float(second[1]) == 0.25


def test_module_invocation():
    proc = subprocess.run(
        [sys.executable, "-m", "qdisc", "tabulate", "--q", "0.5", "--nmax", "2"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("n,y,g1,g2")


def test_verify_full_suite_passes(tmp_path):
    # the whole identity registry at the default tolerances
    out = tmp_path / "report.json"
    code, _ = run_cli(["verify", "--q", "0.5", "--out", str(out)])
    report = json.loads(out.read_text())
    failing = [c["check"] for c in report["checks"] if not c["pass"]]
    assert code == 0, f"failing checks: {failing}"
    assert report["passed"] is True
    assert len(report["checks"]) >= 40
