import subprocess
import sys

import pytest

from sbsdephasing import __version__
from sbsdephasing.cli import (
    UsageError,
    build_partition,
    main,
    parse_config_file,
    resolve_config,
    run,
)
from sbsdephasing.tables import ResultTable, format_value, read_csv


def _run(tmp_path, *args):
    out = tmp_path / "out.csv"
    rc = main([*args, "--out", str(out)])
    return rc, (read_csv(out) if out.exists() else None)


def test_indicators_first_row_zero(tmp_path):
    rc, t = _run(tmp_path, "indicators", "--s", "3", "--tmax", "2", "--points", "5")
    assert rc == 0
    assert t.rows[0][1:] == [0.0, 0.0]
    assert t.metadata["method"] == "quadrature"
    assert t.metadata["version"] == __version__


def test_indicators_both_methods_agree(tmp_path):
    rc, t = _run(tmp_path, "indicators", "--s", "4", "--temp", "0.5", "--method", "both",
                 "--tmax", "5", "--points", "6")
    assert rc == 0
    for q, c in zip(t.column("log_dec"), t.column("log_dec_closed")):
        assert q == pytest.approx(c, rel=1e-9, abs=1e-15)


def test_nmeasure_markovian(tmp_path):
    rc, t = _run(tmp_path, "nmeasure", "--s", "2", "--temp", "1")
    assert rc == 0
    assert len(t.rows) == 1 and t.column("N")[0] <= 1e-6


def test_gamma_curve(tmp_path):
    rc, t = _run(tmp_path, "gamma-curve", "--s", "4", "--temp", "0", "--tmax", "3", "--points", "4")
    assert rc == 0
    assert t.columns == ["t", "gamma"]
    assert t.rows[0][1] == 0.0


def test_output_is_deterministic(tmp_path):
    args = ["indicators", "--s", "3.5", "--cut", "single", "--beta", "2", "--tmax", "4", "--points", "5"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*args, "--out", str(a)]) == 0
    assert main([*args, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_metadata_echoes_defaults(tmp_path):
    rc, t = _run(tmp_path, "indicators", "--tmax", "1", "--points", "2")
    for key in ("s", "lambda", "temp", "cut", "rel_tol", "abs_tol", "tmin", "tmax", "points", "sigma"):
        assert key in t.metadata


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# demo\ns = 4.5\ntemp = 2   # inline comment\ncut = single\nbeta = 3\n", encoding="utf-8")
    c = resolve_config("indicators", parse_config_file(cfg), {"temp": 0.5})
    assert c["s"] == 4.5 and c["temp"] == 0.5 and c["cut"] == "single"
    assert c.partition().beta == 3.0
    assert {"s", "temp", "cut", "beta"} <= c.explicit


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("no equals sign\n", encoding="utf-8")
    with pytest.raises(UsageError):
        parse_config_file(bad)
    bad.write_text("colour = red\n", encoding="utf-8")
    with pytest.raises(UsageError):
        resolve_config("indicators", parse_config_file(bad), {})
    with pytest.raises(UsageError):
        parse_config_file(tmp_path / "missing.cfg")


@pytest.mark.parametrize("args", [
    ["indicators", "--cut", "single"],
    ["indicators", "--s", "-1"],
    ["indicators", "--method", "closed", "--cut", "single", "--beta", "2"],
    ["sweep", "--param", "s"],
    ["indicators", "--tmax", "1", "--points", "1"],
    ["nosuch"],
    ["indicators", "--bogus"],
    ["reproduce-fig", "no-such-tag"],
])
def test_usage_errors_exit_1(args, tmp_path):
    out = tmp_path / "x.csv"
    try:
        rc = main([*args, "--out", str(out)])
    except SystemExit as exc:
        rc = exc.code
    assert rc == 1


def test_numerical_failure_exit_2(tmp_path):
    # t = 1e6 needs more half-period panels than the quadrature budget allows
    rc = main(["indicators", "--s", "3", "--tmin", "1e6", "--tmax", "2e6", "--points", "2",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 2


def test_oracle_check_failure_exit_2(tmp_path):
    rc = main(["oracle-check", "--modes", "50", "--out", str(tmp_path / "x.csv")])
    assert rc == 2


def test_oracle_check_passes(tmp_path):
    rc, t = _run(tmp_path, "oracle-check", "--modes", "20000")
    assert rc == 0
    assert float(t.metadata["max_rel_dev"]) <= 1e-3
    assert t.metadata["method"] == "oracle"


def test_sweep_ordered_parallel(tmp_path):
    rc, t = _run(tmp_path, "sweep", "--param", "beta", "--cut", "single", "--s", "2",
                 "--values", "3,1,2", "--jobs", "3", "--tmax", "10")
    assert rc == 0
    assert t.column("beta") == [3.0, 1.0, 2.0]
    # s = 2 with the unobserved part starting at beta: finite plateau
    assert all(v < float("inf") for v in t.column("neg_log_dec_inf"))


def test_divergence_sentinel(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--param", "s", "--values", "2", "--tmax", "5", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.strip().splitlines()[-1].split(",")[3] == "inf"
    assert "# divergence = " in text


def test_reproduce_fig_small_grid(tmp_path):
    out = tmp_path / "fig.csv"
    rc = main(["reproduce-fig", "onecut-comparison", "--values", "1,4", "--tmax", "10",
               "--out", str(out), "--plot"])
    assert rc == 0
    t = read_csv(out)
    assert t.columns == ["beta", "N", "neg_log_dec_inf", "neg_log_fid_inf"]
    assert t.metadata["figure"] == "onecut-comparison"
    assert t.metadata["figure_s"] == "5"
    assert out.with_suffix(".png").stat().st_size > 0


def test_reproduce_fig_time_series(tmp_path):
    rc, t = _run(tmp_path, "reproduce-fig", "dec-vs-t", "--tmax", "4", "--points", "3")
    assert rc == 0
    assert t.columns == ["t", "neg_log_dec_s2", "neg_log_dec_s3", "neg_log_dec_s4", "neg_log_dec_s5"]
    assert t.rows[0][1:] == [0.0] * 4


def test_build_partition_variants():
    assert build_partition("window", None, 5.0, 2.0, None).alpha == 3.0
    assert build_partition("window", None, 1.0, 2.0, None).kind == "single"
    assert build_partition("soft", None, 2.0, None, None, 2.0).sigma == pytest.approx(0.1)
    with pytest.raises(UsageError):
        build_partition("window", None, 5.0, None, None)


def test_format_value():
    assert format_value(True) == "1"
    assert format_value(float("inf")) == "inf"
    assert format_value(-0.0) == "0"
    assert format_value(0.1) == "0.10000000000000001"
    with pytest.raises(ValueError):
        format_value(float("nan"))
    with pytest.raises(ValueError):
        ResultTable(["a"]).add_row(1, 2)


def test_console_script_stdout():
    proc = subprocess.run([sys.executable, "-m", "sbsdephasing.cli", "indicators", "--tmax", "1",
                           "--points", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    lines = [l for l in proc.stdout.splitlines() if not l.startswith("#")]
    assert lines[0] == "t,log_dec,log_fid"


def test_run_returns_table():
    c = resolve_config("gamma-curve", {}, {"tmax": 1.0, "points": 2})
    assert isinstance(run(c), ResultTable)
