"""Second-order differential operators whose eigenspaces are the cone's V_n.

Solid operators are applied exactly to ``MVPoly`` objects.  Surface operators
are applied to separated functions ``g(t) t^m Y(xi)``, where the spherical
Laplacian acts on ``Y`` through its eigenvalue ``-m(m+d-2)``.  A finite
difference path gives an independent check of the solid operators.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial

from .conebasis import ConeBasisElement
from .errors import CapabilityError, ConfigurationError, ConsistencyError, GeometryError
from .polyalg import MVPoly, differentiate, euler, laplacian_x
from .quaddomains import ConeParams, ConePoint

__all__ = [
    "KINDS",
    "OperatorSpec",
    "apply_operator",
    "apply_surface_operator",
    "surface_radial",
    "eigen_residual",
    "proportionality_residual",
    "fd_apply",
]

KINDS = {
    "solid_jacobi": "cone_jacobi",
    "solid_laguerre": "cone_laguerre",
    "surface_jacobi": "surface_jacobi",
    "surface_laguerre": "surface_laguerre",
}


@dataclass(frozen=True)
class OperatorSpec:
    """Operator kind with its parameters (``beta`` is fixed by the kind)."""

    kind: str
    d: int
    mu: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown operator kind {self.kind!r}")
        if self.surface and self.d < 2:
            raise CapabilityError("surface operators need d >= 2")
        self.params  # validates the ranges

    @classmethod
    def for_params(cls, params: ConeParams) -> "OperatorSpec":
        kind = next(k for k, f in KINDS.items() if f == params.family)
        return cls(kind, params.d, params.mu, params.gamma)

    @property
    def surface(self) -> bool:
        return self.kind.startswith("surface")

    @property
    def beta(self) -> float:
        return -1.0 if self.surface else 0.0

    @property
    def params(self) -> ConeParams:
        return ConeParams(self.d, self.mu if not self.surface else 0.5, self.beta, self.gamma, KINDS[self.kind])

    def eigenvalue(self, n: int) -> float:
        d, mu, g = self.d, self.mu, self.gamma
        if self.kind == "solid_jacobi":
            return -n * (n + 2 * mu + g + d)
        if self.kind == "surface_jacobi":
            return -n * (n + g + d - 1)
        return -float(n)


def _mul_var(p: MVPoly, which, power: int = 1) -> MVPoly:
    """Multiply by ``x_i^power`` or ``t^power`` (shift exponents)."""
    idx = p.dim if which == "t" else which - 1
    out = {}
    for e, c in p.items():
        ne = list(e)
        ne[idx] += power
        out[tuple(ne)] = c
    return MVPoly(p.dim, out)


def apply_operator(spec: OperatorSpec, u: MVPoly) -> MVPoly:
    """Exact ``D u`` for the solid operators."""
    if spec.surface:
        raise CapabilityError("surface operators act on separated forms; use apply_surface_operator")
    if u.dim != spec.d:
        raise ConfigurationError(f"polynomial has dim {u.dim}, operator has d = {spec.d}")
    d, mu = spec.d, spec.mu
    ut = differentiate(u, "t")
    utt = differentiate(ut, "t")
    ex_ut = euler(ut, include_t=False)  # <x, grad> d/dt u
    ex_u = euler(u, include_t=False)
    if spec.kind == "solid_laguerre":
        return (_mul_var(laplacian_x(u) + utt, "t") + ex_ut * 2 - ex_u
                + ut * (2 * mu + d) - _mul_var(ut, "t"))
    c = 2 * mu + spec.gamma + d + 1
    out = _mul_var(utt, "t") - _mul_var(utt, "t", 2)
    out = out + ex_ut * 2 - _mul_var(ex_ut, "t") * 2
    out = out + _mul_var(laplacian_x(u), "t")
    # sum_i x_i^2 d_ii + 2 sum_{i<j} x_i x_j d_ij = <x,grad>^2 - <x,grad>
    out = out - (euler(ex_u, include_t=False) - ex_u)
    out = out + ut * (2 * mu + d) - (ex_u + _mul_var(ut, "t")) * c
    return out


def _as_poly(p) -> Polynomial:
    if isinstance(p, Polynomial):
        return p
    return Polynomial(np.atleast_1d(np.asarray(p, dtype=float)))


def apply_surface_operator(spec: OperatorSpec, radial, m: int, form: str = "g") -> Polynomial:
    """Radial part of ``D (g(t) t^m Y)`` as a polynomial ``f~(t)`` (so ``D u = f~ Y(xi)``).

    ``form="f"`` passes ``f = g t^m`` directly; a non-vanishing ``f(0)`` with
    ``m >= 1`` leaves a ``t^-1`` term and raises ``ConsistencyError``.
    """
    if not spec.surface:
        raise CapabilityError("solid operators act on MVPoly; use apply_operator")
    d, g = spec.d, spec.gamma
    p = _as_poly(radial)
    f = p * Polynomial([0.0] * m + [1.0]) if form == "g" else p
    lb = m * (m + d - 2)
    t = Polynomial([0.0, 1.0])
    c = f.coef
    if lb and abs(c[0]) > 1e-14 * max(1.0, np.max(np.abs(c))):
        raise ConsistencyError(f"t^-1 term does not cancel: f(0) = {c[0]!r} with m = {m}")
    f_over_t = Polynomial(c[1:]) if len(c) > 1 else Polynomial([0.0])
    df, d2f = f.deriv(1), f.deriv(2)
    if spec.kind == "surface_jacobi":
        out = t * (1 - t) * d2f + (d - 1 - (d + g) * t) * df - lb * f_over_t
    else:
        out = t * d2f + (d - 1 - t) * df - lb * f_over_t
    return out


def surface_radial(element: ConeBasisElement) -> Polynomial:
    """``f(t)`` with ``element(t xi, t) = f(t) Y(xi)``."""
    from . import scalar1d as s1

    p = element.params
    a = 2 * p.alpha + 2 * element.m
    if p.jacobi:
        g = s1.jacobi_polynomial(element.n - element.m, a, p.gamma)(Polynomial([1.0, -2.0]))
    else:
        g = s1.laguerre_polynomial(element.n - element.m, a)
    return g * Polynomial([0.0] * element.m + [1.0])


def _check_family(element: ConeBasisElement, spec: OperatorSpec):
    if element.params.family != KINDS[spec.kind] or element.params.d != spec.d:
        raise ConfigurationError(
            f"element family {element.params.family} (d={element.params.d}) does not match {spec.kind}")


def _residual_vectors(element: ConeBasisElement, spec: OperatorSpec):
    _check_family(element, spec)
    if spec.surface:
        f = surface_radial(element)
        return apply_surface_operator(spec, f, element.m, form="f").coef, f.coef
    u = element.poly
    du = apply_operator(spec, u)
    keys = sorted(set(u.terms) | set(du.terms))
    ut, dt = u.terms, du.terms
    return np.array([dt.get(k, 0.0) for k in keys]), np.array([ut.get(k, 0.0) for k in keys])


def eigen_residual(element: ConeBasisElement, spec: OperatorSpec) -> float:
    """``max|D u - lambda(n) u| / max|lambda(n) u|`` over coefficients (absolute if lambda = 0)."""
    du, u = _residual_vectors(element, spec)
    k = max(len(du), len(u))
    du, u = np.pad(du, (0, k - len(du))), np.pad(u, (0, k - len(u)))
    lam = spec.eigenvalue(element.n)
    res = np.max(np.abs(du - lam * u))
    return float(res if lam == 0 else res / np.max(np.abs(lam * u)))


def proportionality_residual(element: ConeBasisElement, spec: OperatorSpec) -> float:
    """``min_c max|D u - c u| / max|D u|``: zero iff u is an eigenfunction for some c."""
    du, u = _residual_vectors(element, spec)
    k = max(len(du), len(u))
    du, u = np.pad(du, (0, k - len(du))), np.pad(u, (0, k - len(u)))
    scale = np.max(np.abs(du))
    if scale == 0:
        return 0.0
    c = float(np.dot(du, u) / np.dot(u, u))
    return float(np.max(np.abs(du - c * u)) / scale)


def _fd_derivatives(f: Callable, z: np.ndarray, h: float):
    """4th-order central gradient and Hessian of ``f`` at ``z``."""
    n = len(z)
    eye = np.eye(n) * h
    w1 = np.array([1.0, -8.0, 8.0, -1.0]) / (12 * h)
    offs = np.array([-2, -1, 1, 2])
    grad = np.empty(n)
    hess = np.empty((n, n))
    f0 = f(z)
    for i in range(n):
        vals = np.array([f(z + k * eye[i]) for k in offs])
        grad[i] = w1 @ vals
        hess[i, i] = (-vals[0] + 16 * vals[1] - 30 * f0 + 16 * vals[2] - vals[3]) / (12 * h * h)
        for j in range(i):
            inner = np.array([[f(z + a * eye[i] + b * eye[j]) for b in offs] for a in offs])
            hess[i, j] = hess[j, i] = w1 @ inner @ w1
    return grad, hess


def _operator_from_derivatives(spec: OperatorSpec, x, t, grad, hess) -> float:
    d, mu = spec.d, spec.mu
    gx, gt = grad[:d], grad[d]
    hx, hxt, htt = hess[:d, :d], hess[:d, d], hess[d, d]
    ex = float(x @ gx)
    if spec.kind == "solid_laguerre":
        return t * (np.trace(hx) + htt) + 2 * float(x @ hxt) - ex + (2 * mu + d - t) * gt
    c = 2 * mu + spec.gamma + d + 1
    quad = t * np.trace(hx) - float(x @ hx @ x)
    return (t * (1 - t) * htt + 2 * (1 - t) * float(x @ hxt) + quad
            + (2 * mu + d) * gt - c * (ex + t * gt))


def fd_apply(spec: OperatorSpec, f: Callable, point: ConePoint, h: float | None = None,
             richardson: bool = True) -> float:
    """Operator value at an interior point by finite differences.

    ``f(x, t)`` takes an x-vector and a scalar.  The default step is
    ``1e-3 * max(1, t)``; one Richardson step combines ``h`` and ``h/2``.
    The stencil reaches ``2h`` along two axes at once, so the point must
    be ``3h`` away from the boundary.
    """
    if spec.surface:
        raise CapabilityError("finite differences are provided for the solid operators only")
    x = np.asarray(point.x, dtype=float)
    t = float(point.t)
    if len(x) != spec.d:
        raise GeometryError(f"point has {len(x)} x-coordinates, expected {spec.d}")
    h = 1e-3 * max(1.0, t) if h is None else h
    margin = 3 * h
    top = np.inf if spec.kind == "solid_laguerre" else 1.0
    if not (margin < t < top - margin and np.linalg.norm(x) < t - margin):
        raise GeometryError(f"point ({x}, {t}) within {margin} of the boundary")

    def g(z):
        return float(f(z[:-1], z[-1]))

    z = np.append(x, t)

    def value(step):
        return _operator_from_derivatives(spec, x, t, *_fd_derivatives(g, z, step))

    v1 = value(h)
    if not richardson:
        return v1
    v2 = value(h / 2)
    return (16 * v2 - v1) / 15
