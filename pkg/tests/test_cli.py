import csv

import pytest

from cheeger.cli import fmt, main
from cheeger.config import ConfigError, EmptyConfigError, RunConfig, check_t_grid


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def write(tmp_path, text, name="run.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


# ---------------------------------------------------------------------------
# configuration


def test_config_roundtrip(tmp_path):
    cfg = RunConfig.load(write(tmp_path, """
schema = 1
[run]
seed = 3
t_grid = [0, 1, 10]
tol = 1e-7
[feasibility]
dims = [1, 3]
l = 3
constraints = [[1, 1]]
"""))
    assert cfg.seed == 3 and cfg.t_grid == (0.0, 1.0, 10.0) and cfg.tol == 1e-7
    assert cfg.feasibility["dims"] == [1, 3]


@pytest.mark.parametrize("text,match", [
    ("schema = 2", "schema"),
    ("[run]\nseed = 1", "schema"),
    ("schema = 1\n[run]\nsede = 1", "unknown key 'sede'"),
    ("schema = 1\n[bogus]\nx = 1", "bogus"),
    ("schema = 1\n[run]\nseed = 'a'", r"\[run\] seed"),
    ("schema = 1\n[run]\nt_grid = [0, 10, 1]", "strictly increasing"),
    ("schema = 1\n[run]\nt_grid = [-1, 1]", "non-negative"),
    ("schema = 1\n[coho1]\nblocks = [{n = 1, knid = 'sin'}]", "blocks\\[0\\]"),
    ("schema = 1\n[run\n", "run.toml"),
])
def test_config_errors(tmp_path, text, match):
    with pytest.raises(ConfigError, match=match):
        RunConfig.load(write(tmp_path, text))


def test_empty_config(tmp_path):
    with pytest.raises(EmptyConfigError):
        RunConfig.load(write(tmp_path, "  \n"))


def test_check_t_grid():
    assert check_t_grid(["0", "1e3"]) == (0.0, 1000.0)
    with pytest.raises(ConfigError):
        check_t_grid([])


def test_fmt_uses_17_significant_digits():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(3) == "3" and fmt(True) == "true"
    assert float(fmt(2.0 / 3.0)) == 2.0 / 3.0


# ---------------------------------------------------------------------------
# subcommands


def test_no_subcommand_is_usage_error(capsys):
    assert main([]) == 2


def test_empty_config_exit_2(tmp_path):
    assert main(["feasibility", "--config", write(tmp_path, ""), "--out", str(tmp_path)]) == 2


def test_unknown_key_exit_2(tmp_path, capsys):
    cfg = write(tmp_path, "schema = 1\n[feasibility]\ndimz = [1, 3]\n")
    assert main(["feasibility", "--config", cfg, "--out", str(tmp_path)]) == 2
    assert "[feasibility] unknown key 'dimz'" in capsys.readouterr().err


def test_feasibility_default(tmp_path):
    assert main(["feasibility", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "feasibility.csv")
    assert rows[0] == ["block", "dim", "inf", "lambda", "lambda_exact"]
    assert rows[1][4] == "12/5" and rows[2][4] == "-7/5"
    assert rows[1][3] == "2.3999999999999999"
    assert "feasible: True, side 1" in (tmp_path / "feasibility.txt").read_text()


def test_feasibility_infeasible_config(tmp_path):
    cfg = write(tmp_path, 'schema = 1\n[feasibility]\ndims = [1, 3]\nl = 3\nconstraints = [["1/2", "3/2"]]\n')
    assert main(["feasibility", "--config", cfg, "--out", str(tmp_path / "f.csv")]) == 0
    assert "feasible: False" in (tmp_path / "f.txt").read_text()


def test_counterexample_n5(tmp_path):
    out = tmp_path / "report.csv"
    assert main(["counterexample", "--n", "5", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["t", "ricci_t_X", "scal_min", "quotient_gap"]
    assert [float(r[0]) for r in rows[1:]] == [0.0, 1.0, 10.0, 1e3, 1e6]
    assert all(abs(float(r[1]) + 1.8) < 1e-8 for r in rows[1:])


def test_counterexample_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert main(["counterexample", "--n", "5", "--seed", "4", "--t-grid", "0,1,100", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_counterexample_negative_control_fails(tmp_path, capsys):
    cfg = write(tmp_path, "schema = 1\n[warped]\ncounterexample_lambdas = [6.0, -1.0]\n")
    assert main(["counterexample", "--config", cfg, "--out", str(tmp_path)]) == 1
    assert "contract failed: Ric^H(X) < 0" in capsys.readouterr().err


def test_criterion(tmp_path):
    assert main(["criterion", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "criterion.txt").read_text()
    assert "effective: False" in text and "12/5" in text
    cfg = write(tmp_path, "schema = 1\n[group]\nm = 3\nblocks = ['std', 'adj']\n")
    assert main(["criterion", "--config", cfg, "--out", str(tmp_path)]) == 0


def test_coho1_check(tmp_path, capsys):
    assert main(["coho1-check", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "coho1-check.csv")
    assert rows[0] == ["s", "d2_trace_p_inverse", "identity_residual_0"]
    cfg = write(tmp_path, """
schema = 1
[coho1]
R = 1.0
c_min = 0.5
blocks = [{n = 1, kind = "const", c = 1.0}, {n = 2, kind = "const", c = 2.0}]
""")
    assert main(["coho1-check", "--config", cfg, "--out", str(tmp_path)]) == 1
    assert "d2/ds2 tr P^-1 >= c_min" in capsys.readouterr().err


def test_scalar_scan(tmp_path):
    assert main(["scalar-scan", "--n", "6", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "scalar-scan.csv")
    assert rows[0][0] == "t" and all(r[4] == "0" or float(r[4]) == 0.0 for r in rows[1:])


def test_verify_curvature(tmp_path):
    cfg = write(tmp_path, """
schema = 1
[warped]
n1 = 1
n2 = 3
lambda1 = 2.4
lambda2 = -1.4
profile_kind = "sinh"
psi_shift = 0.3
domain = [0.35, 2.0]
points = 5
""")
    assert main(["verify-curvature", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert len(read_csv(tmp_path / "verify-curvature.csv")) == 6


def test_bad_warped_config(tmp_path):
    cfg = write(tmp_path, "schema = 1\n[warped]\nlambda2 = 1.0\n")
    assert main(["verify-curvature", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_small_n_rejected(tmp_path):
    assert main(["counterexample", "--n", "4", "--out", str(tmp_path)]) == 2
