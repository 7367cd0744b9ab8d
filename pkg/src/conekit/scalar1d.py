"""Classical orthogonal polynomials of one variable.

Jacobi, Gegenbauer (and the normalized kernel polynomial ``Z_n^lambda``),
Chebyshev and Laguerre polynomials, evaluated by three-term recurrence;
their norms with respect to unit-mass weights; Gauss rules built by the
Golub-Welsch eigenvalue method with Newton polishing; and the 1-D kernel
sums and identities used by the cone kernels.

All weights are normalized to unit mass:

* ``jacobi(a, b)``: ``c'_{a,b} (1-x)^a (1+x)^b`` on ``[-1, 1]``
* ``gegenbauer(lam)``: ``c_lam (1-x^2)^(lam-1/2)`` on ``[-1, 1]``
* ``laguerre(a)``: ``x^a e^{-x} / Gamma(a+1)`` on ``[0, inf)``
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .errors import ConfigurationError, NumericError, ParameterDomainError

__all__ = [
    "WeightSpec",
    "QuadRule1D",
    "poch",
    "jacobi_const",
    "jacobi_const_normalized",
    "gegenbauer_const",
    "laguerre_const",
    "jacobi",
    "jacobi_all",
    "gegenbauer",
    "gegenbauer_all",
    "chebyshev_t",
    "zonal",
    "zonal_all",
    "zonal_homogeneous_all",
    "laguerre",
    "laguerre_all",
    "jacobi_polynomial",
    "laguerre_polynomial",
    "eval_classical",
    "norm_classical",
    "jacobi_norm",
    "gauss_rule",
    "limit_rule",
    "gegenbauer_weight_rule",
    "cesaro_weights",
    "jacobi_kernel",
    "gegenbauer_coefficient",
    "verify_1d_identities",
]

_PARAM_TOL = 1e-14


@dataclass(frozen=True)
class WeightSpec:
    """A classical weight family and its parameters."""

    family: str
    params: tuple[float, ...]

    @classmethod
    def jacobi(cls, a: float, b: float) -> "WeightSpec":
        return cls("jacobi", (float(a), float(b))).validated()

    @classmethod
    def gegenbauer(cls, lam: float, evaluation_only: bool = False) -> "WeightSpec":
        spec = cls("gegenbauer", (float(lam),))
        return spec.validated(evaluation_only=evaluation_only)

    @classmethod
    def laguerre(cls, a: float) -> "WeightSpec":
        return cls("laguerre", (float(a),)).validated()

    def validated(self, evaluation_only: bool = False) -> "WeightSpec":
        if self.family == "jacobi":
            a, b = self.params
            if not (a > -1 and b > -1):
                raise ParameterDomainError(f"jacobi weight needs a, b > -1, got {a}, {b}")
        elif self.family == "gegenbauer":
            (lam,) = self.params
            if not lam > -0.5:
                raise ParameterDomainError(f"gegenbauer weight needs lambda > -1/2, got {lam}")
            if lam == 0 and not evaluation_only:
                raise ParameterDomainError("lambda = 0 is evaluation-only (Chebyshev branch)")
        elif self.family == "laguerre":
            (a,) = self.params
            if not a > -1:
                raise ParameterDomainError(f"laguerre weight needs a > -1, got {a}")
        else:
            raise ParameterDomainError(f"unknown weight family {self.family!r}")
        return self

    def jacobi_params(self) -> tuple[float, float]:
        """Jacobi parameters of a Jacobi or Gegenbauer weight."""
        if self.family == "jacobi":
            return self.params  # type: ignore[return-value]
        if self.family == "gegenbauer":
            lam = self.params[0]
            return (lam - 0.5, lam - 0.5)
        raise ConfigurationError("laguerre weight has no Jacobi form")


@dataclass(frozen=True)
class QuadRule1D:
    """Gauss-type rule for a unit-mass weight."""

    nodes: np.ndarray
    weights: np.ndarray
    exact_degree: int
    spec: WeightSpec | None = None
    normalized: bool = True
    limit: bool = field(default=False)

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    def integrate(self, values) -> float:
        return float(np.sum(self.weights * np.asarray(values, dtype=float)))


# ---------------------------------------------------------------------------
# constants


def poch(a: float, n: int) -> float:
    """Pochhammer symbol ``(a)_n``; log-gamma once ``n + a`` exceeds 30."""
    if n < 0:
        raise ParameterDomainError("negative Pochhammer length")
    if n == 0:
        return 1.0
    if a > 0 and n + a > 30:
        return math.exp(gammaln(a + n) - gammaln(a))
    out = 1.0
    for k in range(n):
        out *= a + k
    return out


def jacobi_const(a: float, b: float) -> float:
    """``c_{a,b} = Gamma(a+b+2) / (Gamma(a+1) Gamma(b+1))``, i.e. 1/B(a+1, b+1)."""
    if not (a > -1 and b > -1):
        raise ParameterDomainError(f"c_(a,b) needs a, b > -1, got {a}, {b}")
    return math.exp(gammaln(a + b + 2) - gammaln(a + 1) - gammaln(b + 1))


def jacobi_const_normalized(a: float, b: float) -> float:
    """``c'_{a,b}``, the unit-mass constant of ``(1-x)^a (1+x)^b`` on [-1, 1]."""
    return jacobi_const(a, b) / 2.0 ** (a + b + 1)


def gegenbauer_const(lam: float) -> float:
    """``c_lam``, the unit-mass constant of ``(1-x^2)^(lam-1/2)``."""
    if not lam > -0.5:
        raise ParameterDomainError(f"c_lambda needs lambda > -1/2, got {lam}")
    return math.exp(gammaln(lam + 1) - gammaln(0.5) - gammaln(lam + 0.5))


def laguerre_const(a: float) -> float:
    """``1 / Gamma(a+1)``."""
    if not a > -1:
        raise ParameterDomainError(f"laguerre constant needs a > -1, got {a}")
    return math.exp(-gammaln(a + 1))


# ---------------------------------------------------------------------------
# evaluation by recurrence


def _finish(x, out):
    return float(out) if np.ndim(x) == 0 else out


def jacobi_all(n: int, a: float, b: float, x) -> np.ndarray:
    """Rows ``P_0^{(a,b)}(x) .. P_n^{(a,b)}(x)``; shape ``(n+1,) + x.shape``."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n == 0:
        return out
    out[1] = (a + 1) + (a + b + 2) * (x - 1) / 2
    ab = a + b
    for k in range(2, n + 1):
        c0 = 2 * k * (k + ab) * (2 * k + ab - 2)
        c1 = (2 * k + ab - 1) * (2 * k + ab) * (2 * k + ab - 2)
        c2 = (2 * k + ab - 1) * (a * a - b * b)
        c3 = 2 * (k + a - 1) * (k + b - 1) * (2 * k + ab)
        out[k] = ((c1 * x + c2) * out[k - 1] - c3 * out[k - 2]) / c0
    return out


def jacobi(n: int, a: float, b: float, x):
    """Jacobi polynomial ``P_n^{(a,b)}(x)``."""
    if n < 0:
        raise ParameterDomainError("degree must be >= 0")
    return _finish(x, jacobi_all(n, a, b, x)[n])


def gegenbauer_all(n: int, lam: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n == 0:
        return out
    out[1] = 2 * lam * x
    for k in range(1, n):
        out[k + 1] = (2 * (k + lam) * x * out[k] - (k + 2 * lam - 1) * out[k - 1]) / (k + 1)
    return out


def gegenbauer(n: int, lam: float, x):
    """Gegenbauer polynomial ``C_n^lam(x)`` with ``C_n^lam(1) = (2 lam)_n / n!``."""
    if n < 0:
        raise ParameterDomainError("degree must be >= 0")
    return _finish(x, gegenbauer_all(n, lam, x)[n])


def _chebyshev_all(n: int, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n:
        out[1] = x
    for k in range(1, n):
        out[k + 1] = 2 * x * out[k] - out[k - 1]
    return out


def chebyshev_t(n: int, x):
    return _finish(x, _chebyshev_all(n, x)[n])


def zonal_all(n: int, lam: float, x) -> np.ndarray:
    """Rows ``Z_0^lam .. Z_n^lam``; ``Z_k^0 = 2 T_k`` (k >= 1), ``Z_0^0 = 1``."""
    if not lam > -0.5:
        raise ParameterDomainError(f"Z_n^lambda needs lambda > -1/2, got {lam}")
    if lam == 0:
        out = 2 * _chebyshev_all(n, x)
        out[0] = 1.0
        return out
    out = gegenbauer_all(n, lam, x)
    k = np.arange(n + 1).reshape((-1,) + (1,) * (out.ndim - 1))
    return out * (k + lam) / lam


def zonal(n: int, lam: float, x):
    """``Z_n^lam(x) = (n + lam)/lam C_n^lam(x)``, Chebyshev branch at lam = 0."""
    if n < 0:
        raise ParameterDomainError("degree must be >= 0")
    return _finish(x, zonal_all(n, lam, x)[n])


def zonal_homogeneous_all(n: int, lam: float, w, tau) -> np.ndarray:
    """Rows ``tau^k Z_k^lam(w / tau)`` for k = 0..n, finite at ``tau = 0``."""
    w = np.asarray(w, dtype=float)
    tau = np.asarray(tau, dtype=float)
    w, tau = np.broadcast_arrays(w, tau)
    tau2 = tau * tau
    out = np.empty((n + 1,) + w.shape)
    out[0] = 1.0
    if lam == 0:
        if n:
            out[1] = w
        for k in range(1, n):
            out[k + 1] = 2 * w * out[k] - tau2 * out[k - 1]
        out[1:] *= 2
        return out
    if n:
        out[1] = 2 * lam * w
    for k in range(1, n):
        out[k + 1] = (2 * (k + lam) * w * out[k] - (k + 2 * lam - 1) * tau2 * out[k - 1]) / (k + 1)
    k = np.arange(n + 1).reshape((-1,) + (1,) * w.ndim)
    return out * (k + lam) / lam


def laguerre_all(n: int, a: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n == 0:
        return out
    out[1] = 1 + a - x
    for k in range(1, n):
        out[k + 1] = ((2 * k + 1 + a - x) * out[k] - (k + a) * out[k - 1]) / (k + 1)
    return out


def laguerre(n: int, a: float, x):
    """Laguerre polynomial ``L_n^a(x)``."""
    if n < 0:
        raise ParameterDomainError("degree must be >= 0")
    return _finish(x, laguerre_all(n, a, x)[n])


def jacobi_polynomial(n: int, a: float, b: float) -> Polynomial:
    """``P_n^{(a,b)}`` in the power basis of its argument."""
    x = Polynomial([0.0, 1.0])
    p0, p1 = Polynomial([1.0]), (a + 1) + (a + b + 2) * (x - 1) / 2
    if n == 0:
        return p0
    ab = a + b
    for k in range(2, n + 1):
        c0 = 2 * k * (k + ab) * (2 * k + ab - 2)
        c1 = (2 * k + ab - 1) * (2 * k + ab) * (2 * k + ab - 2)
        c2 = (2 * k + ab - 1) * (a * a - b * b)
        c3 = 2 * (k + a - 1) * (k + b - 1) * (2 * k + ab)
        p0, p1 = p1, ((c1 * x + c2) * p1 - c3 * p0) / c0
    return p1


def laguerre_polynomial(n: int, a: float) -> Polynomial:
    """``L_n^a`` in the power basis."""
    x = Polynomial([0.0, 1.0])
    p0, p1 = Polynomial([1.0]), Polynomial([1 + a, -1.0])
    if n == 0:
        return p0
    for k in range(1, n):
        p0, p1 = p1, ((2 * k + 1 + a - x) * p1 - (k + a) * p0) / (k + 1)
    return p1


def eval_classical(spec: WeightSpec, n: int, x, zonal_kernel: bool = False):
    """Evaluate the degree-``n`` polynomial of ``spec`` at ``x``.

    Gegenbauer specs return ``C_n^lam`` or, with ``zonal_kernel=True``,
    ``Z_n^lam`` (which also accepts ``lam = 0``).
    """
    if n < 0:
        raise ParameterDomainError("degree must be >= 0")
    if spec.family == "jacobi":
        return jacobi(n, *spec.params, x)
    if spec.family == "gegenbauer":
        lam = spec.params[0]
        return zonal(n, lam, x) if zonal_kernel else gegenbauer(n, lam, x)
    if spec.family == "laguerre":
        return laguerre(n, spec.params[0], x)
    raise ParameterDomainError(f"unknown family {spec.family!r}")


# ---------------------------------------------------------------------------
# norms


def jacobi_norm(n: int, a: float, b: float) -> float:
    """``h_n^{(a,b)}`` for the unit-mass Jacobi weight."""
    if n == 0:
        return 1.0
    ab = a + b
    logh = (
        gammaln(a + 1 + n) - gammaln(a + 1)
        + gammaln(b + 1 + n) - gammaln(b + 1)
        - gammaln(n + 1)
        - (gammaln(ab + 2 + n) - gammaln(ab + 2))
    )
    return float(math.exp(logh) * (ab + n + 1) / (ab + 2 * n + 1))


def norm_classical(spec: WeightSpec, n: int) -> float:
    """Squared norm of the degree-``n`` polynomial w.r.t. the unit-mass weight."""
    if n < 0:
        raise ParameterDomainError("degree must be >= 0")
    if spec.family == "jacobi":
        return jacobi_norm(n, *spec.params)
    if spec.family == "gegenbauer":
        lam = spec.params[0]
        if lam == 0:
            raise ParameterDomainError("lambda = 0 has no Gegenbauer norm")
        return lam / (n + lam) * poch(2 * lam, n) / math.factorial(n)
    if spec.family == "laguerre":
        return poch(spec.params[0] + 1, n) / math.factorial(n)
    raise ParameterDomainError(f"unknown family {spec.family!r}")


# ---------------------------------------------------------------------------
# Gauss rules


def _recurrence(spec: WeightSpec, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Monic recurrence coefficients ``alpha_k`` (k < m) and ``beta_k`` (k <= m)."""
    k = np.arange(m + 1, dtype=float)
    if spec.family == "laguerre":
        (a,) = spec.params
        return (2 * k + a + 1)[:m], k * (k + a)
    a, b = spec.jacobi_params()
    ab = a + b
    alpha = np.empty(m + 1)
    beta = np.zeros(m + 1)
    alpha[0] = (b - a) / (ab + 2)
    s = 2 * k[1:] + ab
    alpha[1:] = (b * b - a * a) / (s * (s + 2))
    if m >= 1:
        beta[1] = 4 * (1 + a) * (1 + b) / ((2 + ab) ** 2 * (3 + ab))
    kk = k[2:]
    s = 2 * kk + ab
    beta[2:] = 4 * kk * (kk + a) * (kk + b) * (kk + ab) / (s * s * (s + 1) * (s - 1))
    return alpha[:m], beta


def _orthonormal_table(x: np.ndarray, alpha, sqrt_beta, m: int):
    """Orthonormal ``p_0..p_m`` and ``p_m'`` at x (unit-mass weight)."""
    p = np.empty((m + 1,) + x.shape)
    dp_prev = np.zeros_like(x)
    dp = np.zeros_like(x)
    p[0] = 1.0
    prev = np.zeros_like(x)
    for k in range(m):
        nxt = ((x - alpha[k]) * p[k] - (sqrt_beta[k] * prev if k else 0.0)) / sqrt_beta[k + 1]
        dnxt = (p[k] + (x - alpha[k]) * dp - (sqrt_beta[k] * dp_prev if k else 0.0)) / sqrt_beta[k + 1]
        prev = p[k]
        dp_prev, dp = dp, dnxt
        p[k + 1] = nxt
    return p, dp


def gauss_rule(spec: WeightSpec, m: int) -> QuadRule1D:
    """``m``-point Gauss rule for the unit-mass weight of ``spec`` (exact to 2m-1)."""
    if m < 1:
        raise ParameterDomainError("node count must be >= 1")
    spec = spec.validated()
    alpha, beta = _recurrence(spec, m)
    sqrt_beta = np.sqrt(beta)
    if m == 1:
        x = np.array([alpha[0]])
    else:
        x = eigh_tridiagonal(alpha, sqrt_beta[1:m], eigvals_only=True)
    for _ in range(8):
        p, dp = _orthonormal_table(x, alpha, sqrt_beta, m)
        step = p[m] / dp
        x = x - step
        if np.all(np.abs(step) <= 1e-15 * np.maximum(1.0, np.abs(x))):
            break
    else:
        bad = int(np.argmax(np.abs(step) / np.maximum(1.0, np.abs(x))))
        if abs(step[bad]) > 1e-12 * max(1.0, abs(x[bad])):
            raise NumericError(f"Newton refinement did not converge at node {bad}")
    p, _ = _orthonormal_table(x, alpha, sqrt_beta, m)
    w = 1.0 / np.sum(p[:m] ** 2, axis=0)
    order = np.argsort(x)
    return QuadRule1D(x[order].copy(), w[order].copy(), 2 * m - 1, spec)


def limit_rule() -> QuadRule1D:
    """Two-point average ``(f(1) + f(-1))/2``: the lam -> -1/2 limit of a Gegenbauer rule."""
    return QuadRule1D(np.array([-1.0, 1.0]), np.array([0.5, 0.5]), 10**9, None, limit=True)


def gegenbauer_weight_rule(lam: float, m: int) -> QuadRule1D:
    """Rule for ``c_lam (1-x^2)^(lam-1/2)``; lam = -1/2 gives the two-point limit."""
    if abs(lam + 0.5) <= _PARAM_TOL:
        return limit_rule()
    if lam < -0.5:
        raise ParameterDomainError(f"Gegenbauer weight needs lambda >= -1/2, got {lam}")
    return gauss_rule(WeightSpec.jacobi(lam - 0.5, lam - 0.5), m)


# ---------------------------------------------------------------------------
# kernels and identities


def cesaro_weights(n: int, delta: float | None) -> np.ndarray:
    """``binom(n-k+delta, n-k) / binom(n+delta, n)`` for k = 0..n (all ones if delta is None)."""
    if delta is None:
        return np.ones(n + 1)
    if delta < 0:
        raise ParameterDomainError("Cesaro order must be >= 0")
    j = np.arange(n + 1, dtype=float)[::-1]  # j = n - k

    def logbinom(top, bot):
        return gammaln(top + 1) - gammaln(bot + 1) - gammaln(top - bot + 1)

    return np.exp(logbinom(j + delta, j) - logbinom(n + delta, n))


def jacobi_kernel(n: int, a: float, b: float, u, v, delta: float | None = None):
    """Partial-sum kernel ``k_n(w_{a,b}; u, v)``, Cesaro ``k_n^delta`` when delta is given."""
    WeightSpec.jacobi(a, b)
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    pu = jacobi_all(n, a, b, u)
    pv = jacobi_all(n, a, b, v)
    h = np.array([jacobi_norm(k, a, b) for k in range(n + 1)])
    c = cesaro_weights(n, delta) / h
    c = c.reshape((-1,) + (1,) * (pu.ndim - 1))
    out = np.sum(c * pu * pv, axis=0)
    return float(out) if out.ndim == 0 else out


def gegenbauer_coefficient(g: Callable, n: int, lam: float, rule: QuadRule1D) -> float:
    """``c_lam * integral g(u) C_n^lam(u)/C_n^lam(1) (1-u^2)^(lam-1/2) du`` by ``rule``."""
    if not lam > -0.5 or lam == 0:
        raise ParameterDomainError(f"need lambda > -1/2, lambda != 0, got {lam}")
    if rule.spec is None or rule.spec.family == "laguerre":
        raise ConfigurationError("rule is not a Gegenbauer rule")
    a, b = rule.spec.jacobi_params()
    if abs(a - (lam - 0.5)) > _PARAM_TOL or abs(b - (lam - 0.5)) > _PARAM_TOL:
        raise ConfigurationError(f"rule weight ({a}, {b}) does not match lambda = {lam}")
    c = gegenbauer_all(n, lam, rule.nodes)[n] / (poch(2 * lam, n) / math.factorial(n))
    return rule.integrate(np.asarray(g(rule.nodes), dtype=float) * c)


def verify_1d_identities(kind: str, **args) -> float:
    """Absolute residual of a 1-D identity.

    ``index_raise`` (lam, sigma, m, t[, nodes]):
        ``Z_m^lam(t)`` against the double integral of ``Z_m^{lam+sigma}``
        over ``(1-z1)^lam (1+z1)^(sigma-1) (1-z2^2)^(sigma-1/2)``.
    ``quadratic_transform`` (lam, n, x):
        ``C_{2n}^lam(x)`` against ``(lam)_n/(1/2)_n P_n^{(lam-1/2,-1/2)}(2x^2-1)``.
    """
    if kind == "index_raise":
        lam, sigma, m, t = args["lam"], args["sigma"], int(args["m"]), args["t"]
        if not (lam > 0 and sigma > 0 and m >= 0 and -1 <= t <= 1):
            raise ParameterDomainError("index_raise needs lam > 0, sigma > 0, m >= 0, |t| <= 1")
        nodes = max(int(args.get("nodes", m + 1)), m + 1)
        r1 = gauss_rule(WeightSpec.jacobi(lam, sigma - 1), nodes)
        r2 = gauss_rule(WeightSpec.gegenbauer(sigma), nodes)
        z1, z2 = np.meshgrid(r1.nodes, r2.nodes, indexing="ij")
        arg = (1 - z1) / 2 * t + (1 + z1) / 2 * z2
        rhs = float(np.sum(np.outer(r1.weights, r2.weights) * zonal_all(m, lam + sigma, arg)[m]))
        return abs(zonal(m, lam, t) - rhs)
    if kind == "quadratic_transform":
        lam, n, x = args["lam"], int(args["n"]), args["x"]
        if not (lam > -0.5 and n >= 0 and -1 <= x <= 1):
            raise ParameterDomainError("quadratic_transform needs lam > -1/2, n >= 0, |x| <= 1")
        lhs = gegenbauer(2 * n, lam, x)
        rhs = poch(lam, n) / poch(0.5, n) * jacobi(n, lam - 0.5, -0.5, 2 * x * x - 1)
        return abs(lhs - rhs)
    raise ParameterDomainError(f"unknown identity {kind!r}")
