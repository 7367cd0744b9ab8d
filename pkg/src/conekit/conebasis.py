"""Orthogonal bases on the solid cone and the cone surface.

Solid families multiply a radial Jacobi (or Laguerre) polynomial in ``t``
by a ball basis element homogenized to degree ``m``.  Surface families use a
solid harmonic of degree ``m`` instead.  Each element carries its exact
polynomial and its closed-form squared norm.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from . import scalar1d as s1
from .errors import BasisIndexError, CapabilityError, ConfigurationError
from .harmonics import ball_basis, harmonic_basis
from .polyalg import MVPoly, compose_univariate, evaluate_many, homogenize_ball_poly
from .quaddomains import ConeParams, DomainRule

__all__ = [
    "ConeBasisElement",
    "basis_element",
    "basis_norm",
    "basis_of_degree",
    "basis",
    "degree_dimension",
    "basis_values",
    "gram_matrix",
    "dump_basis_json",
]


def _angular_family(params: ConeParams, m: int):
    if params.d not in (1, 2, 3):
        raise CapabilityError(f"cone bases are available for d in {{1, 2, 3}}, got {params.d}")
    if params.solid:
        return ball_basis(params.d, params.mu, m)
    return harmonic_basis(params.d, m)


def _radial_params(params: ConeParams, m: int) -> tuple[float, float]:
    """Jacobi parameters ``(2alpha+2m, gamma)`` or Laguerre ``(2alpha+2m, nan)``."""
    return 2 * params.alpha + 2 * m, params.gamma if params.jacobi else math.nan


def _radial_poly(params: ConeParams, n: int, m: int) -> MVPoly:
    a, g = _radial_params(params, m)
    dim = params.d
    if params.jacobi:
        q = MVPoly.constant(dim, 1.0) - MVPoly.var(dim, "t") * 2
        return compose_univariate(s1.jacobi_polynomial(n - m, a, g), q)
    return MVPoly.from_univariate_t(dim, s1.laguerre_polynomial(n - m, a))


@dataclass(frozen=True)
class ConeBasisElement:
    """Basis element ``(n, m, inner)``; ``inner`` indexes the ball/harmonic family."""

    params: ConeParams
    n: int
    m: int
    inner: int

    @cached_property
    def angular(self):
        return _angular_family(self.params, self.m)[self.inner]

    @property
    def label(self) -> str:
        if self.params.solid:
            return f"j={self.angular.j},ell={self.angular.harmonic.ell}"
        return f"ell={self.angular.ell}"

    @cached_property
    def poly(self) -> MVPoly:
        ang = self.angular.poly
        if self.params.solid:
            ang = homogenize_ball_poly(ang, self.m)
        return _radial_poly(self.params, self.n, self.m) * ang

    @cached_property
    def norm(self) -> float:
        return basis_norm(self.params, self.n, self.m)

    def evaluate(self, x, t):
        """Factored evaluation: radial recurrence times homogenized angular part."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return basis_values(self.params, [self], x, t)[0]

    def record(self) -> dict:
        return {
            "family": self.params.family,
            "params": self.params.as_dict(),
            "n": self.n,
            "m": self.m,
            "inner": self.inner,
            "label": self.label,
            "norm": self.norm,
            "poly": self.poly.to_text(),
        }


def basis_element(params: ConeParams, n: int, m: int, inner: int = 0) -> ConeBasisElement:
    if not 0 <= m <= n:
        raise BasisIndexError(f"need 0 <= m <= n, got n={n}, m={m}")
    count = len(_angular_family(params, m))
    if not 0 <= inner < count:
        raise BasisIndexError(f"inner index {inner} out of range 0..{count - 1}")
    return ConeBasisElement(params, n, m, inner)


def basis_norm(params: ConeParams, n: int, m: int) -> float:
    """Closed-form squared norm ``<e, e>`` w.r.t. the normalized weight."""
    if not 0 <= m <= n:
        raise BasisIndexError(f"need 0 <= m <= n, got n={n}, m={m}")
    a0 = params.radial_exponent
    a, g = _radial_params(params, m)
    if params.jacobi:
        ratio = s1.jacobi_const(a0, g) / s1.jacobi_const(a, g)
        return ratio * s1.jacobi_norm(n - m, a, g)
    ratio = math.exp(math.lgamma(a + 1) - math.lgamma(a0 + 1))
    return ratio * s1.poch(a + 1, n - m) / math.factorial(n - m)


@lru_cache(maxsize=None)
def basis_of_degree(params: ConeParams, n: int) -> tuple[ConeBasisElement, ...]:
    """All elements of total degree ``n`` in canonical ``(m, inner)`` order."""
    out = []
    for m in range(n + 1):
        for i in range(len(_angular_family(params, m))):
            out.append(ConeBasisElement(params, n, m, i))
    return tuple(out)


def basis(params: ConeParams, max_degree: int) -> list[ConeBasisElement]:
    return [e for n in range(max_degree + 1) for e in basis_of_degree(params, n)]


def degree_dimension(params: ConeParams, n: int) -> int:
    """``binom(n+d, n)`` (solid) or ``binom(n+d-1, n) + binom(n+d-2, n-1)`` (surface)."""
    d = params.d
    if params.solid:
        return math.comb(n + d, n)
    return math.comb(n + d - 1, n) + (math.comb(n + d - 2, n - 1) if n >= 1 else 0)


def _homog_jacobi(j: int, a: float, b: float, w, tau2):
    """``tau2^j P_j^{(a,b)}(w / tau2)`` by the homogenized recurrence."""
    p0 = np.ones_like(w)
    if j == 0:
        return p0
    p1 = (a + 1) * tau2 + (a + b + 2) * (w - tau2) / 2
    ab = a + b
    for k in range(2, j + 1):
        c0 = 2 * k * (k + ab) * (2 * k + ab - 2)
        c1 = (2 * k + ab - 1) * (2 * k + ab) * (2 * k + ab - 2)
        c2 = (2 * k + ab - 1) * (a * a - b * b)
        c3 = 2 * (k + a - 1) * (k + b - 1) * (2 * k + ab)
        p0, p1 = p1, ((c1 * w + c2 * tau2) * p1 - c3 * tau2 * tau2 * p0) / c0
    return p1


def basis_values(params: ConeParams, elements, x, t) -> np.ndarray:
    """Values of ``elements`` at points ``(x, t)``; shape ``(len(elements), npts)``.

    The radial factor comes from the three-term recurrence at ``1-2t`` (or
    ``t``); the angular factor is the homogenized ball element, evaluated
    without dividing by ``t`` so the apex is harmless.
    """
    x = np.asarray(x, dtype=float).reshape(-1, params.d)
    t = np.asarray(t, dtype=float).reshape(-1)
    elements = list(elements)
    if not elements:
        return np.empty((0, t.size))
    r2 = np.sum(x * x, axis=1)
    t2 = t * t
    radial = {}
    angular = {}
    harm_cache = {}
    out = np.empty((len(elements), t.size))
    for i, e in enumerate(elements):
        if e.params != params:
            raise ConfigurationError("element parameters differ from the requested family")
        key = (e.m, e.inner)
        if key not in angular:
            ang = e.angular
            h = ang.harmonic if params.solid else ang
            hk = (h.m, h.ell)
            if hk not in harm_cache:
                harm_cache[hk] = evaluate_many([h.poly], x, t)[0]
            val = harm_cache[hk]
            if params.solid:
                a, b = ang.jacobi_params
                val = ang.norm_factor * _homog_jacobi(ang.j, a, b, 2 * r2 - t2, t2) * val
            angular[key] = val
        if e.m not in radial:
            top = max(el.n for el in elements if el.m == e.m) - e.m
            a, g = _radial_params(params, e.m)
            if params.jacobi:
                radial[e.m] = s1.jacobi_all(top, a, g, 1 - 2 * t)
            else:
                radial[e.m] = s1.laguerre_all(top, a, t)
        out[i] = radial[e.m][e.n - e.m] * angular[key]
    return out


def gram_matrix(params: ConeParams, max_degree: int, rule: DomainRule,
                normalized: bool = True) -> np.ndarray:
    """Gram matrix of all elements of degree <= ``max_degree`` under ``rule``.

    With ``normalized`` the entries are divided by ``sqrt(norm_i norm_j)``
    using the closed-form norms, so the result should be the identity.
    """
    if rule.params != params:
        raise ConfigurationError("rule was built for different parameters")
    if rule.exact_degree < 2 * max_degree:
        raise ConfigurationError(
            f"rule exact to degree {rule.exact_degree}, need {2 * max_degree}")
    els = basis(params, max_degree)
    v = basis_values(params, els, rule.x, rule.t)
    g = (v * rule.normalized_weights) @ v.T
    if normalized:
        s = 1.0 / np.sqrt([e.norm for e in els])
        g = g * s[:, None] * s[None, :]
    return g


def dump_basis_json(elements) -> str:
    return json.dumps([e.record() for e in elements], sort_keys=True, indent=1)
