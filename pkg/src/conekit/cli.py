"""Command-line front end.

``conekit <command> [options]``; every command writes a JSON or CSV report
(stdout unless ``--out`` is given).  Exit codes: 0 pass, 1 tolerance
failure, 2 configuration error, 3 I/O error.

Options may also come from ``--config FILE``, a flat ``key = value`` file
using the long option names (``max-degree = 6``).  Flags override the
file, which overrides the defaults.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import acceptance as acc
from . import conefourier as cf
from . import conekernels as ck
from . import scalar1d as s1
from .conebasis import basis, gram_matrix
from .coneops import KINDS, OperatorSpec, eigen_residual, proportionality_residual
from .errors import ConekitError, ExprSyntaxError
from .expr import compile_expr
from .harmonics import verify_addition
from .quaddomains import ConeParams, ConePoint, cone_rule
from .report import Report, emit_report

__all__ = ["RunConfig", "build_parser", "load_config_file", "make_config", "run_command", "main"]

log = logging.getLogger("conekit")

COMMANDS = ("basis", "gram", "eigen", "kernel-compare", "project", "cesaro-table", "lebesgue-table",
            "identities", "young", "fourpoint", "rule", "acceptance")

DEFAULTS = {
    "d": 2, "family": "solid-jacobi", "mu": 0.5, "beta": 0.0, "gamma": 0.0, "max_degree": 4, "n": 4,
    "delta": None, "routes": "sum,triangle,closed", "f": "exp(t)*cos(x1) + t^2", "quad_order": None,
    "seed": 0, "out": None, "format": "json", "pairs": 20, "criteria": None, "kind": "P",
}

ROUTE_ALIASES = {"sum": "basis_sum", "basis_sum": "basis_sum", "triangle": "triangle_integral",
                 "triangle_integral": "triangle_integral", "closed": "closed_form", "closed_form": "closed_form"}


class ConfigFileError(ConekitError, ValueError):
    """Malformed configuration file."""


@dataclass
class RunConfig:
    command: str
    params: ConeParams
    max_degree: int
    n: int
    deltas: list[float]
    routes: list[str]
    f: str
    quad_order: int | None
    seed: int
    out: str | None
    format: str
    pairs: int = 20
    criteria: list[int] = field(default_factory=list)
    kind: str = "P"


def _floats(text) -> list[float]:
    if text is None or text == "":
        return []
    if isinstance(text, (int, float)):
        return [float(text)]
    return [float(v) for v in str(text).split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="conekit", description="Orthogonal structure on cones: verification suites.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="key = value file with option defaults")
    S = argparse.SUPPRESS
    ap.add_argument("--d", type=int, default=S, help="dimension of x (1..3)")
    ap.add_argument("--family", default=S, help="solid-jacobi, solid-laguerre, surface-jacobi, surface-laguerre")
    ap.add_argument("--mu", type=float, default=S)
    ap.add_argument("--beta", type=float, default=S)
    ap.add_argument("--gamma", type=float, default=S)
    ap.add_argument("--max-degree", dest="max_degree", type=int, default=S)
    ap.add_argument("--n", type=int, default=S, help="kernel / projection degree")
    ap.add_argument("--delta", default=S, help="comma-separated Cesaro orders")
    ap.add_argument("--routes", default=S, help="comma-separated kernel routes: sum, triangle, closed")
    ap.add_argument("--kind", default=S, choices=("P", "K", "Kdelta"), help="kernel kind for kernel-compare")
    ap.add_argument("--f", default=S, help="test function expression in x1, x2, x3, t")
    ap.add_argument("--quad-order", dest="quad_order", type=int, default=S, help="cone rule total degree")
    ap.add_argument("--pairs", type=int, default=S, help="random point pairs / points")
    ap.add_argument("--criteria", default=S, help="comma-separated criterion numbers for 'acceptance'")
    ap.add_argument("--seed", type=int, default=S)
    ap.add_argument("--out", default=S, help="output path (stdout if omitted)")
    ap.add_argument("--format", choices=("json", "csv"), default=S)
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def load_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigFileError(f"{path}:{lineno}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            key = k.replace("-", "_")
            if key not in DEFAULTS:
                raise ConfigFileError(f"{path}:{lineno}: unknown key {k!r}")
            out[key] = v
    return out


_TYPES = {"d": int, "mu": float, "beta": float, "gamma": float, "max_degree": int, "n": int,
          "quad_order": int, "seed": int, "pairs": int}


def make_config(command: str, values: dict) -> RunConfig:
    """Merge values over defaults and validate everything up front."""
    v = dict(DEFAULTS)
    v.update({k: x for k, x in values.items() if x is not None})
    for k, typ in _TYPES.items():
        if v[k] is not None:
            try:
                v[k] = typ(v[k])
            except (TypeError, ValueError):
                raise ConfigFileError(f"option {k} expects {typ.__name__}, got {v[k]!r}") from None
    family = str(v["family"])
    beta = v["beta"]
    if "surface" in family and "beta" not in values:
        beta = -1.0
    params = ConeParams(v["d"], v["mu"], beta, v["gamma"], family)
    routes = [r.strip() for r in str(v["routes"]).split(",") if r.strip()]
    for r in routes:
        if r not in ROUTE_ALIASES:
            raise ConfigFileError(f"unknown route {r!r}")
    for k in ("max_degree", "n", "pairs"):
        if v[k] < 0:
            raise ConfigFileError(f"{k} must be >= 0")
    if v["format"] not in ("json", "csv"):
        raise ConfigFileError(f"unknown format {v['format']!r}")
    crit = [int(c) for c in _floats(v["criteria"])] if v["criteria"] is not None else []
    for c in crit:
        if c not in acc.CRITERIA:
            raise ConfigFileError(f"unknown criterion {c}")
    return RunConfig(command, params, v["max_degree"], v["n"], _floats(v["delta"]),
                     [ROUTE_ALIASES[r] for r in routes], str(v["f"]), v["quad_order"], v["seed"],
                     v["out"], v["format"], v["pairs"], crit, v["kind"])


# ---------------------------------------------------------------------------
# commands


def _report(cfg: RunConfig, max_error: float, tol: float | None, columns, rows, passed=None, **extra) -> Report:
    if passed is None:
        passed = tol is None or max_error <= tol
    return Report(cfg.command, cfg.params.as_dict(), cfg.seed, float(max_error), tol, bool(passed),
                  list(columns), rows, extra)


def cmd_basis(cfg: RunConfig) -> Report:
    rows = [[e.n, e.m, e.inner, e.label, e.norm, e.poly.to_text().replace("\n", "; ")]
            for e in basis(cfg.params, cfg.max_degree)]
    return _report(cfg, 0.0, None, ["n", "m", "inner", "label", "norm", "poly"], rows)


def cmd_gram(cfg: RunConfig) -> Report:
    prm = cfg.params
    order = cfg.quad_order or 2 * cfg.max_degree
    g = gram_matrix(prm, cfg.max_degree, cone_rule(prm, order))
    els = basis(prm, cfg.max_degree)
    off = np.abs(g - np.diag(np.diag(g)))
    rows = [[e.n, e.m, e.inner, abs(g[i, i] - 1), float(off[i].max()) if len(els) > 1 else 0.0]
            for i, e in enumerate(els)]
    max_off = float(off.max()) if len(els) > 1 else 0.0
    max_diag = float(np.max(np.abs(np.diag(g) - 1)))
    passed = max_off <= 1e-10 and max_diag <= 1e-11
    return _report(cfg, max(max_off, max_diag), 1e-10, ["n", "m", "inner", "diag_rel_err", "max_offdiag"],
                   rows, passed, max_offdiag=max_off, max_diag_rel=max_diag, elements=len(els))


def cmd_eigen(cfg: RunConfig) -> Report:
    prm = cfg.params
    kind = next(k for k, f in KINDS.items() if f == prm.family)
    spec = OperatorSpec(kind, prm.d, prm.mu, prm.gamma)
    rows = []
    theorem = prm.beta == spec.beta
    worst = 0.0
    for e in basis(prm, cfg.max_degree):
        r = eigen_residual(e, spec)
        pr = proportionality_residual(e, spec)
        rows.append([e.n, e.m, e.inner, spec.eigenvalue(e.n), r, pr])
        worst = max(worst, r if theorem else pr)
    if theorem:
        return _report(cfg, worst, 1e-9, ["n", "m", "inner", "eigenvalue", "residual", "proportionality"], rows,
                       mode="theorem")
    # negative control: some element must fail to be an eigenfunction
    return _report(cfg, worst, 1e-3, ["n", "m", "inner", "eigenvalue", "residual", "proportionality"], rows,
                   passed=worst > 1e-3, mode="negative_control")


def _points(cfg: RunConfig, k: int, rng):
    return acc.random_points(cfg.params, k, rng)


def cmd_kernel_compare(cfg: RunConfig) -> Report:
    rng = np.random.default_rng(cfg.seed)
    prm = cfg.params
    delta = cfg.deltas[0] if cfg.kind == "Kdelta" and cfg.deltas else None
    if cfg.kind == "Kdelta" and delta is None:
        raise ConfigFileError("--kind Kdelta needs --delta")
    p = _points(cfg, cfg.pairs, rng)
    q = _points(cfg, cfg.pairs, rng)
    vals = {}
    for r in cfg.routes:
        if r == "basis_sum":
            vals[r] = ck.kernel_basis_sum(prm, cfg.n, cfg.kind, p, q, delta)
        elif r == "triangle_integral":
            vals[r] = ck.kernel_triangle(prm, cfg.n, p, q, cfg.kind, delta)
        else:
            vals[r] = ck.kernel_closed(prm, cfg.n, p, q, cfg.kind, delta)
    ref = vals[cfg.routes[0]]
    errs = {r: np.abs(vals[r] - ref) / np.maximum(1.0, np.abs(ref)) for r in cfg.routes[1:]}
    cols = ["pair"] + [f"value_{r}" for r in cfg.routes] + [f"relerr_{r}" for r in cfg.routes[1:]]
    rows = [[i] + [vals[r][i] for r in cfg.routes] + [errs[r][i] for r in cfg.routes[1:]]
            for i in range(cfg.pairs)]
    worst = max((float(e.max()) for e in errs.values()), default=0.0)
    return _report(cfg, worst, 1e-8, cols, rows, n=cfg.n, kind=cfg.kind)


def cmd_project(cfg: RunConfig) -> Report:
    rng = np.random.default_rng(cfg.seed)
    prm = cfg.params
    f = compile_expr(cfg.f)
    rule = cone_rule(prm, cfg.quad_order or 2 * cfg.max_degree + 4)
    pts = _points(cfg, cfg.pairs, rng)
    routes = ["coefficients", "kernel_basis"] + (["kernel"] if prm.jacobi and prm.d >= 2 else [])
    rows = []
    worst = 0.0
    for n in range(cfg.max_degree + 1):
        vals = {r: cf.project(f, n, prm, rule, pts, route=r) for r in routes}
        ref = vals["coefficients"]
        scale = max(1.0, float(np.max(np.abs(ref))))
        for i in range(len(ref)):
            errs = [abs(vals[r][i] - ref[i]) / scale for r in routes[1:]]
            worst = max([worst] + errs)
            rows.append([n, i, ref[i]] + errs)
    coeffs = cf.expansion_coefficients(f, cfg.max_degree, prm, rule)
    return _report(cfg, worst, 1e-8, ["n", "point", "proj"] + [f"relerr_{r}" for r in routes[1:]], rows,
                   f=cfg.f, residual_norm=coeffs.residual_norm)


def cmd_cesaro_table(cfg: RunConfig) -> Report:
    rng = np.random.default_rng(cfg.seed)
    prm = cfg.params
    f = compile_expr(cfg.f)
    lam = prm.critical_index
    deltas = cfg.deltas or [lam - 0.5, lam + 0.5, lam + 1]
    rule = cone_rule(prm, cfg.quad_order or 2 * cfg.max_degree + 8)
    pts = _points(cfg, cfg.pairs, rng)
    fp = f(*pts)
    rows = []
    worst = 0.0
    for delta in deltas:
        for n in range(cfg.max_degree + 1):
            s = cf.cesaro_partial_sum(f, n, delta, prm, rule, pts)
            kb = cf.cesaro_partial_sum(f, n, delta, prm, rule, pts, route="kernel_basis")
            agree = float(np.max(np.abs(s - kb))) / max(1.0, float(np.max(np.abs(s))))
            worst = max(worst, agree)
            rows.append([n, delta, float(np.max(np.abs(s - fp))), agree])
    return _report(cfg, worst, 1e-8, ["n", "delta", "value", "route_disagreement"], rows,
                   critical_index=lam, f=cfg.f)


def cmd_lebesgue_table(cfg: RunConfig) -> Report:
    prm = cfg.params
    lam = prm.critical_index
    deltas = cfg.deltas or [lam - 0.5, lam + 0.5]
    ns = [n for n in (4, 8, 16, 32, 64) if n <= max(cfg.max_degree, 4)]
    rows = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", cf.NumericWarning)
        for delta in deltas:
            prev = None
            for n in ns:
                L = cf.apex_lebesgue(prm, n, delta)
                rows.append([n, delta, L, math.nan if prev is None else L / prev])
                prev = L
    return _report(cfg, 0.0, None, ["n", "delta", "value", "ratio_to_previous"], rows,
                   critical_index=lam, warnings=[str(w.message) for w in caught])


def cmd_identities(cfg: RunConfig) -> Report:
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for d in (2, 3):
        for m in range(13):
            x, y = rng.normal(size=(2, d))
            r = verify_addition(d, m, x / np.linalg.norm(x), y / np.linalg.norm(y))
            rows.append(["addition", f"d={d};m={m}", r, 1e-12])
    grid = (0.25, 0.5, 1.0, 2.0, 3.0)
    ts = rng.uniform(-1, 1, 10)
    for lam in grid:
        for sig in grid:
            for m in (0, 2, 4, 6, 8):
                r = max(s1.verify_1d_identities("index_raise", lam=lam, sigma=sig, m=m, t=t) for t in ts)
                rows.append(["index_raise", f"lam={lam};sigma={sig};m={m}", r, 1e-11])
    for lam in (-0.25, 0.5, 1.0, 2.0, 3.0):
        for n in range(9):
            r = max(s1.verify_1d_identities("quadratic_transform", lam=lam, n=n, x=x) for x in ts)
            rows.append(["quadratic_transform", f"lam={lam};n={n}", r, 1e-11])
    passed = all(r[2] <= r[3] for r in rows)
    return _report(cfg, max(r[2] for r in rows), 1e-11, ["identity", "args", "residual", "tolerance"], rows,
                   passed)


def cmd_young(cfg: RunConfig) -> Report:
    res = acc.criterion_10(cases=max(cfg.pairs // 2, 1), seed=cfg.seed)
    rows = [r + [(r[5] - r[6]) / r[6]] for r in res.detail["cases"]]
    return _report(cfg, res.max_error, res.tolerance,
                   ["family", "d", "p", "q", "r", "conv_norm", "bound", "relative_excess"], rows, res.passed)


def cmd_fourpoint(cfg: RunConfig) -> Report:
    rng = np.random.default_rng(cfg.seed)
    prm = ConeParams(2, 0.5, -1, -0.5, "surface_jacobi")
    c = ck.resolve_fourpoint_constant("limit")
    rows = []
    worst = 0.0
    for n in range(cfg.max_degree + 1):
        x, t = acc.random_points(prm, cfg.pairs, rng, (0.02, 1.0))
        y, s = acc.random_points(prm, cfg.pairs, rng, (0.02, 1.0))
        for i in range(cfg.pairs):
            p, q = ConePoint(x[i], t[i]), ConePoint(y[i], s[i])
            ref = ck.kernel_basis_matrix(prm, n, p, q)[0, 0]
            lim = ck.kernel_fourpoint_d2(n, p, q, "limit", c)
            prt = ck.kernel_fourpoint_d2(n, p, q, "printed")
            e = abs(lim - ref) / max(1.0, abs(ref))
            worst = max(worst, e)
            rows.append([n, i, ref, lim, e, abs(prt - ref) / max(1.0, abs(ref))])
    return _report(cfg, worst, 1e-9, ["n", "pair", "basis_sum", "four_point", "relerr", "relerr_printed_variant"],
                   rows, constant=c)


def cmd_rule(cfg: RunConfig) -> Report:
    prm = cfg.params
    rule = cone_rule(prm, cfg.quad_order or 2 * cfg.max_degree)
    rows = [list(rule.x[i]) + [rule.t[i], rule.normalized_weights[i]] for i in range(rule.size)]
    cols = [f"x{i + 1}" for i in range(prm.d)] + ["t", "weight"]
    mass = float(np.sum(rule.normalized_weights))
    return _report(cfg, abs(mass - 1), 1e-12, cols, rows, exact_degree=rule.exact_degree, nodes=rule.size)


def cmd_acceptance(cfg: RunConfig) -> Report:
    results = []
    for k in cfg.criteria or sorted(acc.CRITERIA):
        r = acc.run_criterion(k)
        print(acc.format_line(r), file=sys.stderr)
        results.append(r)
    rows = [r.as_row() for r in results]
    worst = max(r.max_error for r in results)
    return _report(cfg, worst, None, ["criterion", "title", "pass", "max_error", "tolerance", "runtime_s"], rows,
                   all(r.passed for r in results))


HANDLERS = {
    "basis": cmd_basis, "gram": cmd_gram, "eigen": cmd_eigen, "kernel-compare": cmd_kernel_compare,
    "project": cmd_project, "cesaro-table": cmd_cesaro_table, "lebesgue-table": cmd_lebesgue_table,
    "identities": cmd_identities, "young": cmd_young, "fourpoint": cmd_fourpoint, "rule": cmd_rule,
    "acceptance": cmd_acceptance,
}


def run_command(cfg: RunConfig) -> Report:
    log.info("command=%s seed=%d params=%s", cfg.command, cfg.seed, cfg.params.as_dict())
    return HANDLERS[cfg.command](cfg)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose")}
    try:
        values = load_config_file(args.config) if args.config else {}
    except OSError as exc:
        print(f"conekit: cannot read config {args.config}: {exc.strerror or exc}", file=sys.stderr)
        return 3
    except ConfigFileError as exc:
        print(f"conekit: {exc}", file=sys.stderr)
        return 2
    values.update(flags)
    try:
        cfg = make_config(args.command, values)
        report = run_command(cfg)
    except (ExprSyntaxError, ConekitError) as exc:
        print(f"conekit: configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        emit_report(report, cfg.format, cfg.out)
    except OSError as exc:
        print(f"conekit: {exc}", file=sys.stderr)
        return 3
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
