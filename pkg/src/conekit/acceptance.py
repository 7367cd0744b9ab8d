"""Acceptance suite: ten numbered checks with fixed tolerances and runtimes.

Each ``criterion_k`` returns a :class:`CriterionResult`; ``run_all`` runs a
selection and ``format_line`` renders the one-line pass/fail summary.
"""
from __future__ import annotations

import itertools
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import conefourier as cf
from . import conekernels as ck
from . import scalar1d as s1
from .conebasis import basis, basis_of_degree, basis_values, gram_matrix
from .coneops import OperatorSpec, eigen_residual, proportionality_residual
from .harmonics import verify_addition
from .quaddomains import ConeParams, ConePoint, cone_rule

__all__ = ["CriterionResult", "CRITERIA", "random_points", "run_criterion", "run_all", "format_line"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    max_error: float
    tolerance: float
    runtime: float = 0.0
    runtime_limit: float | None = None
    detail: dict = field(default_factory=dict)

    def as_row(self) -> list:
        return [self.number, self.title, self.passed, self.max_error, self.tolerance, self.runtime]


def random_points(params: ConeParams, k: int, rng: np.random.Generator, t_range=(0.05, 0.95)):
    """``k`` points inside the cone (or on the surface), ``t`` uniform in ``t_range``."""
    t = rng.uniform(*t_range, k)
    if params.laguerre:
        t = t * 4
    ang = rng.normal(size=(k, params.d))
    ang /= np.linalg.norm(ang, axis=1)[:, None]
    r = t if params.surface else t * rng.uniform(0, 1, k) ** (1 / params.d)
    return ang * r[:, None], t


def _families_grid():
    """Parameter grid of the orthonormality and eigen suites."""
    out = []
    for d in (2, 3):
        for mu, beta, gamma in itertools.product((0.0, 0.5, 1.5), (-1.0, 0.0, 1.0), (-0.5, 0.0, 1.0)):
            if beta > -1:
                out.append(ConeParams(d, mu, beta, gamma, "cone_jacobi"))
        for mu, beta in itertools.product((0.0, 0.5, 1.5), (0.0, 1.0)):
            out.append(ConeParams(d, mu, beta, 0.0, "cone_laguerre"))
        for beta, gamma in itertools.product((-1.0, 0.0, 1.0), (-0.5, 0.0, 1.0)):
            out.append(ConeParams(d, 0.5, beta, gamma, "surface_jacobi"))
        for beta in (-1.0, 0.0, 1.0):
            out.append(ConeParams(d, 0.5, beta, 0.0, "surface_laguerre"))
    return out


def criterion_1(max_degree: int = 6) -> CriterionResult:
    off = diag = 0.0
    grid = _families_grid()
    for prm in grid:
        g = gram_matrix(prm, max_degree, cone_rule(prm, 2 * max_degree))
        off = max(off, float(np.max(np.abs(g - np.diag(np.diag(g))))))
        diag = max(diag, float(np.max(np.abs(np.diag(g) - 1))))
    ok = off <= 1e-10 and diag <= 1e-11
    return CriterionResult(1, "orthonormality (Gram matrices, four families)", ok, max(off, diag), 1e-10,
                           runtime_limit=120.0,
                           detail={"configs": len(grid), "max_offdiag": off, "max_diag_rel": diag})


def criterion_2(max_degree: int = 8) -> CriterionResult:
    worst = 0.0
    count = 0
    for d in (2, 3):
        specs = [OperatorSpec("solid_jacobi", d, mu, g) for mu, g in ((0.0, -0.5), (0.5, 0.0), (1.5, 1.0))]
        specs += [OperatorSpec("solid_laguerre", d, mu) for mu in (0.0, 1.5)]
        specs += [OperatorSpec("surface_jacobi", d, 0.5, g) for g in (-0.5, 1.0)]
        specs += [OperatorSpec("surface_laguerre", d)]
        for sp in specs:
            prm = sp.params
            for e in basis(prm, max_degree):
                worst = max(worst, eigen_residual(e, sp))
                count += 1
    # negative controls: weights off the theorem value
    neg = 0.0
    for sp, prm in ((OperatorSpec("solid_jacobi", 2, 0.5, 0.0), ConeParams(2, 0.5, 1.0, 0.0)),
                    (OperatorSpec("surface_jacobi", 2, 0.5, 0.0), ConeParams(2, 0.5, 0.0, 0.0, "surface_jacobi"))):
        r = 0.0
        for e in basis(prm, 4):
            r = max(r, proportionality_residual(e, sp))
        neg = r if neg == 0.0 else min(neg, r)
    ok = worst <= 1e-9 and neg > 1e-3
    return CriterionResult(2, "eigen-equations (four operators) + negative control", ok, worst, 1e-9,
                           detail={"elements": count, "negative_control_min": neg})


def _kernel_configs():
    out = []
    for d in (2, 3):
        for mu, g in itertools.product((0.0, 0.5, 1.5), (-0.5, 0.0, 1.0)):
            out.append(ConeParams(d, mu, 0.0, g))
        out.append(ConeParams(d, 0.0, 0.5, -0.5))
        out.append(ConeParams(d, 0.5, 1.0, 0.0))
        for b, g in ((-1.0, -0.5), (-1.0, 0.5), (0.0, 0.0), (1.0, 1.0), (0.5, -0.5)):
            out.append(ConeParams(d, 0.5, b, g, "surface_jacobi"))
    return out


def _rel(a, b):
    return np.abs(a - b) / np.maximum(1.0, np.abs(b))


def criterion_3(pairs: int = 20, degrees=(0, 1, 2, 4, 6, 8), seed: int = 0) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    cfgs = _kernel_configs()
    for prm in cfgs:
        p = random_points(prm, pairs, rng)
        q = random_points(prm, pairs, rng)
        for n in degrees:
            ref = ck.kernel_basis_sum(prm, n, "P", p, q)
            tri = ck.kernel_triangle(prm, n, p, q)
            clo = ck.kernel_closed(prm, n, p, q)
            worst = max(worst, float(np.max(_rel(tri, ref))), float(np.max(_rel(clo, ref))))
    return CriterionResult(3, "kernel routes agree (basis / triangle / closed)", worst <= 1e-8, worst, 1e-8,
                           runtime_limit=300.0, detail={"configs": len(cfgs)})


def criterion_4(max_n: int = 6, seed: int = 1) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    cfgs = [ConeParams(2, 0.5, 0, 0), ConeParams(3, 0.0, 1, -0.5), ConeParams(2, 1.5, 0, 1, "cone_laguerre"),
            ConeParams(2, 0.5, -1, -0.5, "surface_jacobi"), ConeParams(3, 0.5, 0, 1, "surface_jacobi"),
            ConeParams(3, 0.5, 1, 0, "surface_laguerre")]
    for prm in cfgs:
        p = random_points(prm, 5, rng)
        for n in range(max_n + 1):
            rule = cone_rule(prm, 2 * n)
            els = basis_of_degree(prm, n)
            v = basis_values(prm, els, rule.x, rule.t) * rule.normalized_weights
            vp = basis_values(prm, els, *p)
            kernels = [ck.kernel_basis_matrix(prm, n, p, (rule.x, rule.t))]
            if prm.jacobi:
                kernels.append(ck.kernel_closed(prm, n, p, (rule.x, rule.t), outer=True))
            scale = np.maximum(1.0, np.max(np.abs(vp), axis=1))
            for k in kernels:
                err = np.max(np.abs(k @ v.T - vp.T), axis=0) / scale
                worst = max(worst, float(np.max(err)))
    return CriterionResult(4, "reproducing property of P_n", worst <= 1e-8, worst, 1e-8)


def criterion_5(max_n: int = 16, seed: int = 2) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    cfgs = [ConeParams(2, 0.5, 0, 0), ConeParams(3, 1.5, 1, -0.5), ConeParams(2, 0.0, 0, 1),
            ConeParams(2, 0.5, -1, -0.5, "surface_jacobi"), ConeParams(3, 0.5, 0, 1, "surface_jacobi")]
    for prm in cfgs:
        apex = (np.zeros((1, prm.d)), np.zeros(1))
        x, s = random_points(prm, 10, rng, (0.0, 1.0))
        for n in range(max_n + 1):
            full = ck.kernel_basis_matrix(prm, n, apex, (x, s), "K")[0]
            oned = ck.apex_kernel(prm, n, s)
            worst = max(worst, float(np.max(_rel(full, oned))))
    return CriterionResult(5, "apex reduction to the 1-D Jacobi kernel", worst <= 1e-10, worst, 1e-10)


def criterion_6(max_n: int = 10, pairs: int = 10, seed: int = 3) -> CriterionResult:
    rng = np.random.default_rng(seed)
    prm = ConeParams(2, 0.5, -1, -0.5, "surface_jacobi")
    c = ck.resolve_fourpoint_constant("limit")
    worst = 0.0
    for n in range(max_n + 1):
        x, t = random_points(prm, pairs, rng, (0.02, 1.0))
        y, s = random_points(prm, pairs, rng, (0.02, 1.0))
        for i in range(pairs):
            p, q = ConePoint(x[i], t[i]), ConePoint(y[i], s[i])
            ref = ck.kernel_basis_matrix(prm, n, p, q)[0, 0]
            worst = max(worst, float(_rel(ck.kernel_fourpoint_d2(n, p, q, constant=c), ref)))
    # n = 0: the kernel is identically 1 for a unit-mass weight
    p0 = ConePoint([0.1, -0.2], math.hypot(0.1, 0.2))
    norm0 = abs(ck.kernel_fourpoint_d2(0, p0, p0, constant=c) - 1.0)
    ok = worst <= 1e-9 and norm0 <= 1e-12
    return CriterionResult(6, "d=2 surface four-point formula", ok, worst, 1e-9,
                           detail={"constant": c, "n0_normalization_error": norm0})


def criterion_7(seed: int = 4) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    cfgs = [(ConeParams(2, 0.5, 0, 0), 7), (ConeParams(3, 0.0, 0, -0.5), 6), (ConeParams(2, 0.5, 1, 0.5), 5),
            (ConeParams(2, 0.5, -1, -0.5, "surface_jacobi"), 8), (ConeParams(3, 0.5, 0, 0, "surface_jacobi"), 6)]
    fs = [lambda x, t: 1 + x[:, 0] * t - 2 * t ** 3 + x[:, -1] ** 2,
          lambda x, t: np.exp(t) * np.cos(x[:, 0]) + t ** 2 * x[:, -1]]
    g = lambda u: 1 + u ** 2 + 0.3 * u ** 4 + 0.1 * u ** 8  # noqa: E731
    lam_err = 0.0
    for prm, nodes in cfgs:
        lam = prm.critical_index
        rule = cone_rule(prm, 8)
        p = random_points(prm, 3, rng)
        for f in fs:
            fg = cf.convolve(f, g, prm, (rule.x, rule.t), rule, nodes)
            for n in range(3):
                pf = cf.project(f, n, prm, rule, p)
                scale = max(1.0, float(np.max(np.abs(pf))))
                lhs = cf.project(lambda x, t: fg, n, prm, rule, p)
                worst = max(worst, float(np.max(np.abs(lhs - cf.lambda_n(g, n, prm) * pf))) / scale)
                z = lambda u, n=n: s1.zonal(2 * n, lam, u)  # noqa: E731
                worst = max(worst, float(np.max(np.abs(cf.convolve(f, z, prm, p, rule, nodes) - pf))) / scale)
        for n in range(5):
            for k in range(5):
                v = cf.lambda_n(lambda u, k=k: s1.zonal(2 * k, lam, u), n, prm)
                lam_err = max(lam_err, abs(v - (n == k)))
    ok = worst <= 1e-7 and lam_err <= 1e-9
    return CriterionResult(7, "convolution / projection identities", ok, max(worst, lam_err), 1e-7,
                           detail={"projection_identities": worst, "lambda_delta": lam_err})


def criterion_8(seed: int = 5) -> CriterionResult:
    rng = np.random.default_rng(seed)
    add = 0.0
    for d in (2, 3):
        for m in range(13):
            for _ in range(5):
                x, y = rng.normal(size=(2, d))
                add = max(add, verify_addition(d, m, x / np.linalg.norm(x), y / np.linalg.norm(y)))
    grid = (0.25, 0.5, 1.0, 2.0, 3.0)
    ms = (0, 2, 4, 6, 8)
    ts = rng.uniform(-1, 1, 10)
    zz = max(s1.verify_1d_identities("index_raise", lam=lam, sigma=sig, m=m, t=t)
             for lam in grid for sig in grid for m in ms for t in ts)
    qt = max(s1.verify_1d_identities("quadratic_transform", lam=lam, n=n, x=x)
             for lam in (-0.25, 0.5, 1.0, 2.0, 3.0) for n in range(9) for x in ts)
    ok = add <= 1e-12 and zz <= 1e-11 and qt <= 1e-11
    return CriterionResult(8, "addition formula and 1-D identities", ok, max(add, zz, qt), 1e-11,
                           detail={"addition": add, "index_raise": zz, "quadratic_transform": qt})


def criterion_9(seed: int = 6) -> CriterionResult:
    rng = np.random.default_rng(seed)
    prm = ConeParams(2, 0.5, 0, -0.5)
    lam = prm.critical_index
    hi = [cf.apex_lebesgue(prm, n, lam + 0.5) for n in (16, 64)]
    lo = [cf.apex_lebesgue(prm, n, lam - 0.5) for n in (16, 64)]
    r_hi, r_lo = hi[1] / hi[0], lo[1] / lo[0]
    # positivity for delta >= lambda + 1: apex kernel and full-domain pairs
    neg = math.inf
    for cfg in (prm, ConeParams(3, 0.5, 0, 0), ConeParams(2, 0.5, -1, 0, "surface_jacobi")):
        lc = cfg.critical_index
        s = rng.uniform(0, 1, 200)
        p = random_points(cfg, 200, rng, (0.0, 1.0))
        q = random_points(cfg, 200, rng, (0.0, 1.0))
        for n in (4, 8, 16):
            for delta in (lc + 1, lc + 2):
                neg = min(neg, float(np.min(ck.apex_kernel(cfg, n, s, delta))))
                k = ck.kernel_closed(cfg, n, p, q, "Kdelta", delta)
                neg = min(neg, float(np.min(k / np.maximum(1.0, np.abs(k).max()))))
    ok = r_hi < 1.05 and r_lo > 1.2 and neg >= -1e-9
    return CriterionResult(9, "Cesaro trends and positivity", ok, max(0.0, -neg), 1e-9, runtime_limit=300.0,
                           detail={"ratio_above": r_hi, "ratio_below": r_lo, "L_above": hi, "L_below": lo,
                                   "min_kernel": neg})


def _young_case(rng: np.random.Generator):
    kind = rng.integers(4)
    prm = [ConeParams(2, 0.5, 0, 0), ConeParams(3, 0.0, 0, -0.5), ConeParams(2, 0.5, -1, 0.5, "surface_jacobi"),
           ConeParams(3, 0.5, 0, 0, "surface_jacobi")][kind]
    a = rng.uniform(-1, 1, 3)
    c = rng.uniform(0.2, 1.5)
    f = lambda x, t, a=a: a[0] + a[1] * t + a[2] * x[:, 0] * np.exp(t)  # noqa: E731
    g = lambda u, c=c, b=a[1]: np.exp(c * u * u) + b * u ** 4  # noqa: E731
    while True:
        q = float(rng.choice([1.0, 1.5, 2.0, 3.0]))
        r = float(rng.choice([1.0, 1.25, 2.0, 3.0]))
        s = 1 / q + 1 / r - 1
        if s >= 0:
            break
    p = math.inf if s == 0 else 1 / s
    return prm, f, g, p, q, r


def criterion_10(cases: int = 10, seed: int = 7) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = -math.inf
    rows = []
    for _ in range(cases):
        prm, f, g, p, q, r = _young_case(rng)
        lhs, rhs = cf.check_young(f, g, p, q, r, prm, nodes=8)
        excess = (lhs - rhs) / max(rhs, 1e-300)
        worst = max(worst, excess)
        rows.append([prm.family, prm.d, p, q, r, lhs, rhs])
    return CriterionResult(10, "Young's inequality spot checks", worst <= 1e-6, worst, 1e-6,
                           detail={"cases": rows})


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 11)}


def run_criterion(k: int, **kw) -> CriterionResult:
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", cf.NumericWarning)
        res = CRITERIA[k](**kw)
    res.runtime = time.perf_counter() - t0
    if res.runtime_limit is not None and res.runtime > res.runtime_limit:
        res.passed = False
        res.detail["runtime_exceeded"] = True
    return res


def run_all(which=None) -> list[CriterionResult]:
    return [run_criterion(k) for k in (which or sorted(CRITERIA))]


def format_line(res: CriterionResult) -> str:
    status = "PASS" if res.passed else "FAIL"
    limit = f" (limit {res.runtime_limit:.0f}s)" if res.runtime_limit else ""
    parts = [f"{k} {v:.2e}" for k, v in res.detail.items() if isinstance(v, float)]
    parts = f" [{', '.join(parts)}]" if parts else ""
    return (f"criterion {res.number:2d} {status}: {res.title}; max error {res.max_error:.3e} "
            f"vs tol {res.tolerance:.0e}{parts}; {res.runtime:.1f}s{limit}")
