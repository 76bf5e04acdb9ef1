"""Command-line entry point: ``cheeger <subcommand> [options]``.

Every subcommand writes ``<name>.csv`` and ``<name>.txt`` (a human-readable
report) and exits 0 iff all asserted contracts hold; 1 names the first failing
invariant; 2 signals a usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .coho1 import Block, DiagonalMetricFamily, Profile, criterion as coho1_criterion, dual_holonomy_identity_check
from .config import ConfigError, EmptyConfigError, RunConfig, check_t_grid
from .core import TangentVector, ricci_t, scal_t
from .counterexamples import (abelian_action, build, join_quotient_ricci, point_model, sample_points,
                              scalar_blowup_scan, verify_negative_ricci, verify_quotient_ricci)
from .fdcurv import FDOracleConfig
from .feasibility import FeasibilityInstance, direction_oracle, is_solution, solve_lambdas_2, solve_lambdas_n
from .limiting import block_sum_rep, effectiveness_criterion, inf_trace
from .warped import (WarpedChart, WarpedMetricSpec, curvature_operator, fd_frame_riemann, schur_residual)

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_CONTRACT, EXIT_USAGE = 0, 1, 2


def fmt(x) -> str:
    """Serialize a number with 17 significant digits (round-trip exact for floats)."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, Fraction):
        return f"{float(x):.17g}"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


class Outcome:
    """Collects CSV rows, report lines and contract results for one subcommand."""

    def __init__(self, name: str, columns: Sequence[str]):
        self.name = name
        self.columns = list(columns)
        self.rows: list[list] = []
        self.lines: list[str] = []
        self.failures: list[str] = []

    def row(self, *values) -> None:
        if len(values) != len(self.columns):
            raise AssertionError("row width does not match the header")
        self.rows.append(list(values))

    def say(self, line: str) -> None:
        self.lines.append(line)

    def require(self, ok: bool, invariant: str) -> None:
        self.say(f"[{'ok' if ok else 'FAIL'}] {invariant}")
        if not ok:
            self.failures.append(invariant)

    def write(self, out: str) -> tuple[Path, Path]:
        p = Path(out)
        if p.suffix == ".csv":
            csv_path, txt_path = p, p.with_suffix(".txt")
        else:
            csv_path, txt_path = p / f"{self.name}.csv", p / f"{self.name}.txt"
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.columns)
            for r in self.rows:
                w.writerow([fmt(v) for v in r])
        status = "PASS" if not self.failures else f"FAIL: {self.failures[0]}"
        txt_path.write_text("\n".join([f"cheeger {self.name}", *self.lines, status]) + "\n")
        return csv_path, txt_path


# ---------------------------------------------------------------------------
# subcommands


def _sphere_dim(cfg: RunConfig, args) -> int:
    n = args.n if args.n is not None else cfg.group.get("n", 5)
    if n < 5:
        raise ConfigError(f"[group] n: the construction needs n >= 5 (got {n})")
    return int(n)


def _counterexample_spec(cfg: RunConfig, args):
    lam = cfg.warped.get("counterexample_lambdas")
    if lam is not None and len(lam) != 2:
        raise ConfigError("[warped] counterexample_lambdas: expected [lambda1, lambda2]")
    try:
        return build(_sphere_dim(cfg, args), lam)
    except ValueError as exc:
        raise ConfigError(f"[warped] counterexample_lambdas: {exc}") from exc


def cmd_counterexample(cfg: RunConfig, args) -> Outcome:
    spec = _counterexample_spec(cfg, args)
    tol = cfg.tol if cfg.tol is not None else 1e-8
    grid = cfg.t_grid
    out = Outcome("counterexample", ["t", "ricci_t_X", "scal_min", "quotient_gap"])
    out.say(f"n = {spec.n}, lambda = ({spec.lambdas[0]:.17g}, {spec.lambdas[1]:.17g}), t0 = {spec.t0:.17g}")
    out.say(f"Ric^H(X) = lambda1 + (n-2) lambda2 = {spec.ricci_H:.17g}")
    neg = verify_negative_ricci(spec, grid, tol=tol)
    rng = np.random.default_rng(cfg.seed)
    pts = sample_points(spec, rng, n_regular=max(cfg.points - cfg.points // 5, 1), n_singular=cfg.points // 5)
    models = [point_model(spec, t, th, y)[0] for t, th, y in pts]
    regular = [(m, t) for m, (t, _, y) in zip(models, pts) if abs(abs(y[0]) / np.linalg.norm(y) - 1) > 1e-12]
    regular = regular[:5]
    for row, t in zip(neg.rows, grid):
        gap = 0.0
        for m, tp in regular:
            X = TangentVector(m.horizontal.T @ np.eye(m.n)[0], np.zeros(m.lie.dim))
            gap = max(gap, abs(ricci_t(m, X, t) - join_quotient_ricci(spec.warped, tp)[0]))
        out.row(t, row["ricci_t_X"], min(scal_t(m, t) for m in models), gap)
    out.require(neg.passed, neg.failure or "ricci_t(X) = lambda1 + (n-2) lambda2 < 0 on the t grid")
    quo = verify_quotient_ricci(spec, rng=np.random.default_rng(cfg.seed))
    out.say(f"quotient Ricci min = {quo.info['min_quotient_ricci']:.17g}, rescale = {quo.info['rescale']:.17g}")
    out.require(quo.passed, quo.failure or "regular-point limit equals the quotient Ricci curvature at rate 1/t")
    return out


def cmd_scalar_scan(cfg: RunConfig, args) -> Outcome:
    spec = _counterexample_spec(cfg, args)
    grid = cfg.t_grid if cfg.t_grid_set else (0.0, 1.0, 10.0, 1e2, 1e3)
    rng = np.random.default_rng(cfg.seed)
    pts = sample_points(spec, rng, n_regular=max(cfg.points - cfg.points // 5, 1), n_singular=cfg.points // 5)
    full = scalar_blowup_scan(spec, grid, pts)
    ab = scalar_blowup_scan(spec, grid, pts, action=abelian_action(spec.n))
    out = Outcome("scalar-scan", ["t", "scal_min", "bracket_max", "abelian_scal_min", "abelian_bracket_max"])
    for r, a in zip(full.rows, ab.rows):
        out.row(r["t"], r["scal_min"], r["bracket_max"], a["scal_min"], a["bracket_max"])
    out.say(f"n = {spec.n}, points = {len(pts)}, first T with scal > 0: {full.info['T']}")
    out.require(full.passed, full.failure or "finite T with positive scalar curvature")
    out.require(all(a["bracket_max"] == 0.0 for a in ab.rows), "abelian restriction has zero bracket contribution")
    return out


def _rep_from_config(cfg: RunConfig, args):
    g = cfg.group
    if "blocks" in g or "m" in g:
        if "blocks" not in g or "m" not in g:
            raise ConfigError("[group] blocks and m must be given together")
        try:
            return block_sum_rep(int(g["m"]), list(g["blocks"]), axis=bool(g.get("axis", True)))
        except ValueError as exc:
            raise ConfigError(f"[group] blocks: {exc}") from exc
    n = _sphere_dim(cfg, args)
    return block_sum_rep(n - 2, ["triv", "std"])


def cmd_criterion(cfg: RunConfig, args) -> Outcome:
    rep = _rep_from_config(cfg, args)
    tol = cfg.tol if cfg.tol is not None else 1e-6
    rng = np.random.default_rng(cfg.seed)
    if not bool(cfg.group.get("axis", True)):
        raise ConfigError("[group] axis: the criterion needs a declared fixed axis as the first block")
    report = effectiveness_criterion(rep, rng=np.random.default_rng(cfg.seed))
    out = Outcome("criterion", ["block", "dim", "inf_closed_form", "inf_sweep", "gap", "threshold"])
    y = rng.standard_normal(rep.dim_H)
    y -= rep.decomposition[0] @ (rep.decomposition[0].T @ y)
    ok_gap = ok_mono = True
    for j in range(1, len(rep.decomposition)):
        res = inf_trace(rep, j, y, rng=np.random.default_rng(cfg.seed))
        thr = report.thresholds[j - 1] if report.thresholds else float("nan")
        out.row(j, res.block_dim, res.closed_form, res.traces[-1], res.gap, thr)
        ok_gap &= abs(res.gap) <= tol
        ok_mono &= res.monotone()
    out.say(f"l = {report.l}, fixed axes = {report.fixed_axis_dim}, infima = {report.infima}")
    out.say(f"effective: {report.effective} ({report.reason})")
    if report.feasibility is not None and report.feasibility.lambdas is not None:
        out.say("lambdas = (" + ", ".join(str(x) for x in report.feasibility.lambdas) + ")")
    out.require(ok_gap, "alpha-sweep trace matches the closed form")
    out.require(ok_mono, "alpha-sweep is monotone non-increasing")
    return out


def _parse_fraction(x, where: str) -> Fraction:
    try:
        return Fraction(x) if isinstance(x, (int, str)) else Fraction(float(x)).limit_denominator(10 ** 12)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ConfigError(f"{where}: cannot read {x!r} as a rational number") from exc


def cmd_feasibility(cfg: RunConfig, args) -> Outcome:
    f = cfg.feasibility
    dims = f.get("dims", [1, 3])
    l = f.get("l", 3)
    cons = f.get("constraints", [[1, 1]])
    parsed = [[_parse_fraction(a, f"[feasibility] constraints[{i}]") for a in c] for i, c in enumerate(cons)]
    try:
        inst = FeasibilityInstance(dims, l, parsed)
    except ValueError as exc:
        raise ConfigError(f"[feasibility] {exc}") from exc
    res = solve_lambdas_2(inst) if inst.n == 2 else solve_lambdas_n(inst)
    out = Outcome("feasibility", ["block", "dim", "inf", "lambda", "lambda_exact"])
    for j, d in enumerate(inst.dims):
        lam = res.lambdas[j] if res.lambdas is not None else None
        out.row(j + 1, d, inst.inf(j), "" if lam is None else lam, "" if lam is None else str(lam))
    out.say(f"dims = {inst.dims}, l = {inst.l}, constraints = {[tuple(map(str, c)) for c in inst.constraints]}")
    out.say(f"feasible: {res.feasible}" + (f", side {res.side}" if res.side else "")
            + (f", pair {res.pair}" if res.pair else ""))
    if res.feasible:
        out.require(is_solution(inst, res.lambdas), "returned lambdas satisfy both conditions by substitution")
    if inst.n == 2:
        out.require(direction_oracle(inst)[0] == res.feasible, "exact direction oracle agrees with the criterion")
    return out


def _coho1_family(cfg: RunConfig) -> tuple[DiagonalMetricFamily, float]:
    c = cfg.coho1
    R = float(c.get("R", np.pi))
    blocks = c.get("blocks", [{"n": 1, "kind": "sin", "A": 1.0, "tag": "zero"}])
    out = []
    for i, b in enumerate(blocks):
        try:
            prof = Profile(b.get("kind", "sin"), A=float(b.get("A", 1.0)), c=float(b.get("c", 1.0)),
                           reflect=bool(b.get("reflect", False)), R=R if b.get("reflect") else None,
                           knots=tuple(float(x) for x in b.get("knots", ())),
                           values=tuple(float(x) for x in b.get("values", ())))
            out.append(Block(int(b.get("n", 1)), prof, b.get("tag", "neither")))
        except ValueError as exc:
            raise ConfigError(f"[coho1] blocks[{i}]: {exc}") from exc
    try:
        fam = DiagonalMetricFamily(R, tuple(out))
    except ValueError as exc:
        raise ConfigError(f"[coho1] {exc}") from exc
    return fam, float(c.get("c_min", 2.0))


def cmd_coho1(cfg: RunConfig, args) -> Outcome:
    fam, c_min = _coho1_family(cfg)
    tol = cfg.tol if cfg.tol is not None else 1e-6
    rep = coho1_criterion(fam, c_min=c_min, num=int(cfg.coho1.get("num", 401)))
    cols = ["s", "d2_trace_p_inverse"] + [f"identity_residual_{i}" for i in range(len(fam.blocks))]
    out = Outcome("coho1-check", cols)
    worst = 0.0
    for s, v in zip(rep.grid, rep.values):
        res = []
        for i, b in enumerate(fam.blocks):
            r = dual_holonomy_identity_check(fam, float(s), i) if b.profile.closed_form else float("nan")
            res.append(r)
            if np.isfinite(r):
                worst = max(worst, r)
        out.row(s, v, *res)
    out.say(f"R = {fam.R:.17g}, blocks = {len(fam.blocks)}, method = {rep.method}")
    out.say(f"inf d2/ds2 tr P^-1 = {rep.infimum:.17g} at s = {rep.argmin:.17g}; c_min = {c_min:.17g}")
    out.say(f"max identity residual = {worst:.3e}")
    out.require(rep.passed, "d2/ds2 tr P^-1 >= c_min on the grid")
    out.require(worst <= tol, "identity residual within tolerance")
    return out


def _warped_spec(cfg: RunConfig) -> tuple[WarpedMetricSpec, int]:
    w = dict(cfg.warped)
    w.pop("counterexample_lambdas", None)
    points = int(w.pop("points", 20))
    defaults = dict(n1=2, n2=2, lambda1=1.0, lambda2=-1.0, profile_kind="exp")
    defaults.update(w)
    if "domain" in defaults:
        defaults["domain"] = tuple(float(x) for x in defaults["domain"])
    try:
        return WarpedMetricSpec(**defaults), points
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[warped] {exc}") from exc


def cmd_verify_curvature(cfg: RunConfig, args) -> Outcome:
    spec, points = _warped_spec(cfg)
    tol = cfg.tol if cfg.tol is not None else 1e-5
    rng = np.random.default_rng(cfg.seed)
    lo, hi = spec.domain
    out = Outcome("verify-curvature", ["t", "max_rel_err", "schur_residual_analytic", "schur_residual_fd"])
    worst = worst_schur = 0.0
    n1, n2 = spec.n1, spec.n2
    eye = np.eye(n1 + n2)
    blocks = [eye[:, :n1], eye[:, n1:]]
    for t in np.sort(rng.uniform(lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo), points)):
        chart = WarpedChart(spec, float(t), rng.standard_normal(n1 + 1), rng.standard_normal(n2 + 1))
        r_fd = fd_frame_riemann(chart, FDOracleConfig())
        curv = curvature_operator(spec, float(t))
        r = curv.tensor()
        err = float(np.max(np.abs(r - r_fd)) / np.max(np.abs(r)))
        sa = max(x[1] for x in schur_residual(curv, [b for b in blocks if b.shape[1]]))
        rx_fd = np.einsum("abcd,b,c->ad", r_fd, np.eye(spec.dim)[0], np.eye(spec.dim)[0])[1:, 1:]
        sf = max(float(np.max(np.abs(b.T @ rx_fd @ b - np.trace(b.T @ rx_fd @ b) / b.shape[1] * np.eye(b.shape[1]))))
                 for b in blocks if b.shape[1])
        worst, worst_schur = max(worst, err), max(worst_schur, sa)
        out.row(float(t), err, sa, sf)
    out.say(f"spec: n1 = {n1}, n2 = {n2}, lambda = ({spec.lambda1:.17g}, {spec.lambda2:.17g}), "
            f"profile = {spec.profile_kind}, points = {points}")
    out.say(f"max relative error = {worst:.3e}, max analytic Schur residual = {worst_schur:.3e}")
    out.require(worst <= tol, "closed-form curvature matches the finite-difference tensor")
    out.require(worst_schur <= 1e-9, "R_X is scalar on each block")
    return out


COMMANDS: dict[str, tuple[Callable, str]] = {
    "counterexample": (cmd_counterexample, "Ric_{g_t}(X) < 0 at the fixed point of the S^n example"),
    "criterion": (cmd_criterion, "effectiveness report for isotropy data"),
    "feasibility": (cmd_feasibility, "decide and solve the curvature-constant sign problem"),
    "coho1-check": (cmd_coho1, "cohomogeneity-one positivity criterion for a diagonal family"),
    "scalar-scan": (cmd_scalar_scan, "first t with positive scalar curvature on sample points"),
    "verify-curvature": (cmd_verify_curvature, "warped closed-form curvature vs finite differences"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cheeger", description="Cheeger deformation checks")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", metavar="SUBCOMMAND")
    for name, (_, help_) in COMMANDS.items():
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", metavar="PATH", help="TOML run configuration (schema = 1)")
        s.add_argument("--out", metavar="DIR", help="output directory, or a .csv file path")
        s.add_argument("--seed", type=int, help="seed for sampled points")
        s.add_argument("--t-grid", metavar="a,b,c", help="comma-separated deformation parameters")
        s.add_argument("--tol", type=float, help="tolerance for the subcommand's main contract")
        s.add_argument("--n", type=int, help="sphere dimension for the S^n example (>= 5)")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig()
        if args.seed is not None:
            cfg.seed = args.seed
        if args.t_grid is not None:
            cfg.t_grid = check_t_grid(args.t_grid.split(","), "--t-grid")
            cfg.t_grid_set = True
        if args.tol is not None:
            if not args.tol > 0:
                raise ConfigError("--tol must be positive")
            cfg.tol = args.tol
        if args.out is not None:
            cfg.out = args.out
        outcome = COMMANDS[args.command][0](cfg, args)
    except EmptyConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"cheeger: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, OSError) as exc:
        print(f"cheeger: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    csv_path, txt_path = outcome.write(cfg.out)
    print(txt_path.read_text(), end="")
    print(f"wrote {csv_path}")
    if outcome.failures:
        print(f"cheeger: contract failed: {outcome.failures[0]}", file=sys.stderr)
        return EXIT_CONTRACT
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
