"""Real solid harmonics (d = 2, 3) and orthonormal bases on the unit ball.

Solid harmonics are orthonormal with respect to the normalized surface
measure ``dsigma / omega_d``.  Ordering is fixed: cosine before sine, by
increasing azimuthal order.  ``d = 1`` is supported internally ({1} and {x})
so that the triangle is the one-dimensional cone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import scalar1d as s1
from .errors import CapabilityError, GeometryError, ParameterDomainError
from .polyalg import MVPoly, compose_univariate, euler, evaluate_many, laplacian_x
from .quaddomains import ball_rule

__all__ = [
    "HarmonicElement",
    "BallBasisElement",
    "harmonic_dim",
    "harmonic_basis",
    "ball_basis",
    "verify_addition",
    "ball_operator_residual",
]


@dataclass(frozen=True)
class HarmonicElement:
    d: int
    m: int
    ell: int
    poly: MVPoly

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return evaluate_many([self.poly], x, np.zeros(x.shape[:-1]))[0]


@dataclass(frozen=True)
class BallBasisElement:
    """``norm_factor * P_j^{(mu-1/2, m-2j+(d-2)/2)}(2|x|^2-1) Y(x)`` of degree m."""

    d: int
    mu: float
    n: int
    j: int
    harmonic: HarmonicElement
    poly: MVPoly
    norm_factor: float

    @property
    def jacobi_params(self) -> tuple[float, float]:
        return (self.mu - 0.5, self.n - 2 * self.j + (self.d - 2) / 2)


def harmonic_dim(d: int, m: int) -> int:
    """``dim H_m^d``."""
    if m < 0:
        return 0
    if d == 1:
        return 1 if m <= 1 else 0
    out = math.comb(m + d - 1, m)
    if m >= 2:
        out -= math.comb(m + d - 3, m - 2)
    return out


def _complex_power(m: int, dim: int, i1: int, i2: int) -> tuple[MVPoly, MVPoly]:
    """Real and imaginary parts of ``(x_i1 + i x_i2)^m``."""
    re = {}
    im = {}
    for k in range(m + 1):
        c = math.comb(m, k)
        e = [0] * (dim + 1)
        e[i1] = m - k
        e[i2] = k
        # i^k cycles 1, i, -1, -i
        r = k % 4
        if r == 0:
            re[tuple(e)] = c
        elif r == 1:
            im[tuple(e)] = c
        elif r == 2:
            re[tuple(e)] = -c
        else:
            im[tuple(e)] = -c
    return MVPoly(dim, re), MVPoly(dim, im)


def _legendre_ladder(l: int, k: int, dim: int) -> MVPoly:
    """Homogeneous ``Q_l^k(z, r^2)`` with ``r^2 Q(z/r)`` giving the associated Legendre factor."""
    z = MVPoly.var(dim, 3)
    r2 = sum((MVPoly.var(dim, i) ** 2 for i in (1, 2, 3)), MVPoly(dim))
    df = 1.0
    for j in range(1, 2 * k, 2):
        df *= j
    prev2 = None
    prev = MVPoly.constant(dim, df)
    if l == k:
        return prev
    cur = prev * z * (2 * k + 1)
    for ll in range(k + 2, l + 1):
        prev2, prev = prev, cur
        cur = (prev * z * (2 * ll - 1) - prev2 * r2 * (ll + k - 1)) / (ll - k)
    return cur


@lru_cache(maxsize=None)
def harmonic_basis(d: int, m: int) -> tuple[HarmonicElement, ...]:
    """Orthonormal real solid harmonics of degree ``m`` in ``d`` variables."""
    if m < 0:
        raise ParameterDomainError("degree must be >= 0")
    if d == 1:
        if m > 1:
            return ()
        return (HarmonicElement(1, m, 1, MVPoly.var(1, 1) if m else MVPoly.constant(1, 1.0)),)
    if d == 2:
        if m == 0:
            return (HarmonicElement(2, 0, 1, MVPoly.constant(2, 1.0)),)
        re, im = _complex_power(m, 2, 0, 1)
        s = math.sqrt(2.0)
        return (HarmonicElement(2, m, 1, re * s), HarmonicElement(2, m, 2, im * s))
    if d == 3:
        out = []
        for k in range(m + 1):
            q = _legendre_ladder(m, k, 3)
            c = math.sqrt((2 * m + 1) * math.factorial(m - k) / math.factorial(m + k) * (2 if k else 1))
            if k == 0:
                out.append(q * c)
                continue
            re, im = _complex_power(k, 3, 0, 1)
            out.append(re * q * c)
            out.append(im * q * c)
        return tuple(HarmonicElement(3, m, i + 1, p) for i, p in enumerate(out))
    raise CapabilityError(f"explicit harmonics exist for d in {{2, 3}}, got {d}")


def _ball_radial(j: int, a: float, b: float, dim: int) -> MVPoly:
    r2 = sum((MVPoly.var(dim, i) ** 2 for i in range(1, dim + 1)), MVPoly(dim))
    return compose_univariate(s1.jacobi_polynomial(j, a, b), r2 * 2 - 1)


@lru_cache(maxsize=None)
def ball_basis(d: int, mu: float, n: int) -> tuple[BallBasisElement, ...]:
    """Orthonormal basis of degree-``n`` orthogonal polynomials for ``(1-|x|^2)^(mu-1/2)``.

    Ordered by ``j`` (power of the radial Jacobi factor) and then by the
    harmonic index.  Norms are computed by exact ball quadrature.
    """
    if not mu > -0.5:
        raise ParameterDomainError(f"mu must be > -1/2, got {mu}")
    if d not in (1, 2, 3):
        raise CapabilityError(f"ball bases are available for d in {{1, 2, 3}}, got {d}")
    rule = ball_rule(d, mu, 2 * n)
    zeros = np.zeros(rule.size)
    out = []
    for j in range(n // 2 + 1):
        a, b = mu - 0.5, n - 2 * j + (d - 2) / 2
        radial = _ball_radial(j, a, b, d)
        for h in harmonic_basis(d, n - 2 * j):
            p = radial * h.poly
            v = evaluate_many([p], rule.x, zeros)[0]
            nf = 1.0 / math.sqrt(rule.integrate(v * v))
            out.append(BallBasisElement(d, mu, n, j, h, p * nf, nf))
    return tuple(out)


def verify_addition(d: int, m: int, x, y) -> float:
    """``|sum_l Y_l(x) Y_l(y) - Z_m^{(d-2)/2}(<x,y>)|`` for unit vectors x, y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if abs(np.linalg.norm(x) - 1) > 1e-12 or abs(np.linalg.norm(y) - 1) > 1e-12:
        raise GeometryError("addition formula needs unit vectors")
    hs = harmonic_basis(d, m)
    pts = np.stack([x, y])
    vals = evaluate_many([h.poly for h in hs], pts, np.zeros(2))
    lhs = float(np.sum(vals[:, 0] * vals[:, 1]))
    rhs = s1.zonal(m, (d - 2) / 2, float(np.dot(x, y)))
    return abs(lhs - rhs)


def ball_operator_residual(el: BallBasisElement) -> float:
    """Relative residual of ``(Delta - <x,grad>^2 - (2mu+d-1)<x,grad>) u + n(n+2mu+d-1) u``."""
    u = el.poly
    e1 = euler(u, include_t=False)
    e2 = euler(e1, include_t=False)
    lam = el.n * (el.n + 2 * el.mu + el.d - 1)
    res = laplacian_x(u) - e2 - e1 * (2 * el.mu + el.d - 1) + u * lam
    scale = max(u.max_abs_coeff() * max(lam, 1.0), 1e-300)
    return res.max_abs_coeff() / scale
