"""Weights, normalization constants and product quadrature on cone domains.

Every rule here is a tensor product of 1-D Gauss rules in which the weight
exponents are absorbed into the Gauss weight, so integrands are plain
polynomials and exactness is a matter of node counts.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gammaln

from . import scalar1d as s1
from .errors import CapabilityError, ConfigurationError, GeometryError, ParameterDomainError

__all__ = [
    "FAMILIES",
    "ConeParams",
    "ConePoint",
    "DomainRule",
    "sphere_area",
    "ball_constant",
    "normalization_constant",
    "make_rule",
    "sphere_rule",
    "ball_rule",
    "triangle_rule",
    "cone_rule",
    "cone_rule_size",
    "inner_product",
    "integrate",
]

FAMILIES = ("cone_jacobi", "cone_laguerre", "surface_jacobi", "surface_laguerre")
_ALIASES = {
    "solid-jacobi": "cone_jacobi",
    "solid_jacobi": "cone_jacobi",
    "solid-laguerre": "cone_laguerre",
    "solid_laguerre": "cone_laguerre",
    "cone-jacobi": "cone_jacobi",
    "cone-laguerre": "cone_laguerre",
    "surface-jacobi": "surface_jacobi",
    "surface-laguerre": "surface_laguerre",
}


def canonical_family(name: str) -> str:
    name = _ALIASES.get(name, name)
    if name not in FAMILIES:
        raise ParameterDomainError(f"unknown weight family {name!r}")
    return name


@dataclass(frozen=True)
class ConeParams:
    """Weight parameters on the solid cone or its surface.

    ``mu`` is ignored by the surface families.  ``gamma`` is ignored by the
    Laguerre families.
    """

    d: int
    mu: float = 0.5
    beta: float = 0.0
    gamma: float = 0.0
    family: str = "cone_jacobi"

    def __post_init__(self):
        object.__setattr__(self, "family", canonical_family(self.family))
        object.__setattr__(self, "d", int(self.d))
        for name in ("mu", "beta", "gamma"):
            object.__setattr__(self, name, float(getattr(self, name)))
        self.validate()

    def validate(self) -> None:
        d, mu, beta, gamma = self.d, self.mu, self.beta, self.gamma
        if d < 1:
            raise ParameterDomainError("d must be >= 1")
        if self.solid:
            if not mu > -0.5:
                raise ParameterDomainError(f"mu must be > -1/2, got {mu}")
            if not beta > -1:
                raise ParameterDomainError(f"beta must be > -1 on the solid cone, got {beta}")
        elif not beta > -d:
            raise ParameterDomainError(f"beta must be > -d on the surface, got {beta}")
        if self.jacobi and not gamma > -1:
            raise ParameterDomainError(f"gamma must be > -1, got {gamma}")

    @property
    def solid(self) -> bool:
        return self.family.startswith("cone")

    @property
    def surface(self) -> bool:
        return not self.solid

    @property
    def jacobi(self) -> bool:
        return self.family.endswith("jacobi")

    @property
    def laguerre(self) -> bool:
        return not self.jacobi

    @property
    def alpha(self) -> float:
        """``mu + (beta+d-1)/2`` (solid) or ``(beta+d-1)/2`` (surface)."""
        base = (self.beta + self.d - 1) / 2
        return self.mu + base if self.solid else base

    @property
    def radial_exponent(self) -> float:
        """Exponent of ``t`` in the 1-D radial weight after integrating out x."""
        return 2 * self.alpha

    @property
    def critical_index(self) -> float:
        """``2mu+beta+gamma+d`` (solid) or ``beta+gamma+d`` (surface)."""
        g = self.gamma if self.jacobi else 0.0
        return 2 * self.alpha + g + 1

    def replace(self, **kw) -> "ConeParams":
        data = dict(d=self.d, mu=self.mu, beta=self.beta, gamma=self.gamma, family=self.family)
        data.update(kw)
        return ConeParams(**data)

    def as_dict(self) -> dict:
        out = {"d": self.d, "family": self.family, "beta": self.beta}
        if self.solid:
            out["mu"] = self.mu
        if self.jacobi:
            out["gamma"] = self.gamma
        return out


@dataclass(frozen=True)
class ConePoint:
    """A point ``(x, t)`` of the cone."""

    x: tuple[float, ...]
    t: float

    def __init__(self, x, t):
        object.__setattr__(self, "x", tuple(float(v) for v in np.atleast_1d(x)))
        object.__setattr__(self, "t", float(t))

    @property
    def r(self) -> float:
        return float(np.linalg.norm(self.x))

    def check(self, params: ConeParams, tol: float = 1e-12) -> "ConePoint":
        if len(self.x) != params.d:
            raise GeometryError(f"point has {len(self.x)} x-coordinates, expected {params.d}")
        r, t = self.r, self.t
        if params.surface:
            if abs(r - t) > tol:
                raise GeometryError(f"point not on the surface: |x| = {r}, t = {t}")
        elif r > t + tol:
            raise GeometryError(f"point outside the cone: |x| = {r} > t = {t}")
        if t < -tol or (params.jacobi and t > 1 + tol):
            raise GeometryError(f"t = {t} outside the domain")
        return self


@dataclass(frozen=True)
class DomainRule:
    """Product rule; ``weights`` integrate against the unnormalized weight.

    ``b * sum(weights * f)`` approximates the normalized integral.  ``t`` is
    ``None`` for sphere and ball rules.
    """

    domain: str
    x: np.ndarray
    t: np.ndarray | None
    weights: np.ndarray
    exact_degree: int
    b: float
    params: ConeParams | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        for arr in (self.x, self.t, self.weights):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def normalized_weights(self) -> np.ndarray:
        return self.b * self.weights

    @property
    def points(self) -> list[ConePoint]:
        t = self.t if self.t is not None else np.zeros(self.size)
        return [ConePoint(xi, ti) for xi, ti in zip(self.x, t)]

    def integrate(self, values) -> float:
        """Normalized integral of sampled values."""
        return float(np.dot(self.normalized_weights, np.asarray(values, dtype=float)))

    def apply(self, f: Callable) -> float:
        """Normalized integral of ``f(x, t)`` (``f(x)`` for sphere/ball rules)."""
        vals = f(self.x) if self.t is None else f(self.x, self.t)
        return self.integrate(np.broadcast_to(vals, self.weights.shape))

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        d = self.x.shape[1]
        head = [f"x{i + 1}" for i in range(d)] + (["t"] if self.t is not None else []) + ["weight"]
        w.writerow(head)
        for i in range(self.size):
            row = list(self.x[i]) + ([self.t[i]] if self.t is not None else []) + [self.normalized_weights[i]]
            w.writerow([f"{v:.17g}" for v in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text


# ---------------------------------------------------------------------------
# constants


def sphere_area(d: int) -> float:
    """Surface area ``omega_d`` of the unit sphere in R^d."""
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


def ball_constant(d: int, mu: float) -> float:
    """``b_mu^B`` normalizing ``(1-|x|^2)^(mu-1/2)`` on the unit ball of R^d."""
    if not mu > -0.5:
        raise ParameterDomainError(f"mu must be > -1/2, got {mu}")
    return math.exp(gammaln(mu + (d + 1) / 2) - (d / 2) * math.log(math.pi) - gammaln(mu + 0.5))


def normalization_constant(params: ConeParams) -> float:
    """Constant ``b`` that makes the cone weight a probability measure."""
    a = params.radial_exponent
    if params.jacobi:
        radial = s1.jacobi_const(a, params.gamma)
    else:
        radial = s1.laguerre_const(a)
    if params.solid:
        return radial * ball_constant(params.d, params.mu)
    return radial / sphere_area(params.d)


# ---------------------------------------------------------------------------
# rules


def _sphere_nodes(d: int, order: int):
    """Unit-mass rule on S^{d-1} exact for polynomials of degree ``order``."""
    if d == 1:
        return np.array([[-1.0], [1.0]]), np.array([0.5, 0.5])
    if d == 2:
        k = order + 1
        th = 2 * np.pi * np.arange(k) / k
        return np.column_stack([np.cos(th), np.sin(th)]), np.full(k, 1.0 / k)
    if d == 3:
        gz = s1.gauss_rule(s1.WeightSpec.jacobi(0, 0), order // 2 + 1)
        k = order + 1
        ph = 2 * np.pi * np.arange(k) / k
        z, p = np.meshgrid(gz.nodes, ph, indexing="ij")
        rho = np.sqrt(1 - z * z)
        pts = np.column_stack([(rho * np.cos(p)).ravel(), (rho * np.sin(p)).ravel(), z.ravel()])
        w = np.outer(gz.weights, np.full(k, 1.0 / k)).ravel()
        return pts, w
    raise CapabilityError(f"explicit sphere rules exist for d in {{1,2,3}}, got {d}")


def sphere_rule(d: int, order: int) -> DomainRule:
    if order < 0:
        raise ParameterDomainError("order must be >= 0")
    pts, w = _sphere_nodes(d, order)
    area = sphere_area(d)
    return DomainRule("sphere", pts, None, w * area, order, 1.0 / area)


def _ball_nodes(d: int, mu: float, order: int):
    spts, sw = _sphere_nodes(d, order)
    m = max(1, math.ceil((order + 2) / 2))
    ru = s1.gauss_rule(s1.WeightSpec.jacobi(mu - 0.5, (d - 2) / 2), m)
    r = np.sqrt((1 + ru.nodes) / 2)
    pts = (r[:, None, None] * spts[None, :, :]).reshape(-1, d)
    w = np.outer(ru.weights, sw).ravel()
    return pts, w


def ball_rule(d: int, mu: float, order: int) -> DomainRule:
    """Rule for ``(1-|x|^2)^(mu-1/2)`` on the unit ball, exact to degree ``order``."""
    b = ball_constant(d, mu)
    pts, w = _ball_nodes(d, mu, order)
    return DomainRule("ball", pts, None, w / b, order, b, info={"mu": mu})


def _sphere_size(d: int, order: int) -> int:
    if d == 1:
        return 2
    if d == 2:
        return order + 1
    return (order // 2 + 1) * (order + 1)


def cone_rule_size(params: ConeParams, order: int, angular_order: int | None = None,
                   radial_nodes: int | None = None) -> int:
    """Number of nodes ``cone_rule`` would produce, without building it."""
    ang = order if angular_order is None else angular_order
    nt = radial_nodes or max(1, math.ceil((order + 1) / 2))
    size = _sphere_size(params.d, ang)
    if params.solid:
        size *= max(1, math.ceil((ang + 2) / 2))
    return nt * size


def cone_rule(params: ConeParams, order: int, angular_order: int | None = None,
              radial_nodes: int | None = None) -> DomainRule:
    """Product rule on the solid cone or surface, exact to total degree ``order``.

    ``angular_order`` and ``radial_nodes`` override the ball/sphere degree and
    the number of radial nodes (useful for non-polynomial integrands).
    """
    if order < 0:
        raise ParameterDomainError("order must be >= 0")
    ang = order if angular_order is None else angular_order
    nt = radial_nodes or max(1, math.ceil((order + 1) / 2))
    a = params.radial_exponent
    if params.jacobi:
        rt = s1.gauss_rule(s1.WeightSpec.jacobi(a, params.gamma), nt)
        t = (1 - rt.nodes) / 2
    else:
        rt = s1.gauss_rule(s1.WeightSpec.laguerre(a), nt)
        t = rt.nodes
    if params.solid:
        ypts, yw = _ball_nodes(params.d, params.mu, ang)
    else:
        ypts, yw = _sphere_nodes(params.d, ang)
    x = (t[:, None, None] * ypts[None, :, :]).reshape(-1, params.d)
    tt = np.repeat(t, len(yw))
    b = normalization_constant(params)
    w = np.outer(rt.weights, yw).ravel() / b
    exact = min(order, ang, 2 * nt - 1)
    domain = "cone_solid" if params.solid else "cone_surface"
    return DomainRule(domain, x, tt, w, exact, b, params,
                      info={"radial_nodes": nt, "angular_order": ang})


def triangle_rule(alpha: float, gamma: float, order: int) -> DomainRule:
    """Rule on ``{|u| <= t <= 1}`` for ``(t^2-u^2)^(alpha-1/2) (1-t)^gamma``."""
    return cone_rule(ConeParams(1, alpha, 0.0, gamma, "cone_jacobi"), order)


def make_rule(domain: str, order: int, **kw) -> DomainRule:
    """Dispatch on ``sphere`` (d), ``ball`` (d, mu), ``triangle_v2`` (alpha, gamma),
    ``cone_solid``/``cone_surface`` (params)."""
    if order < 1:
        raise ParameterDomainError("order must be >= 1")
    if domain == "sphere":
        return sphere_rule(kw["d"], order)
    if domain == "ball":
        return ball_rule(kw["d"], kw["mu"], order)
    if domain == "triangle_v2":
        return triangle_rule(kw["alpha"], kw["gamma"], order)
    if domain in ("cone_solid", "cone_surface"):
        params: ConeParams = kw["params"]
        if params.solid != (domain == "cone_solid"):
            raise ConfigurationError(f"{domain} rule requested for family {params.family}")
        return cone_rule(params, order, kw.get("angular_order"))
    raise ParameterDomainError(f"unknown domain {domain!r}")


def inner_product(f: Callable, g: Callable, params: ConeParams, rule: DomainRule) -> float:
    """``b * sum_i w_i f(p_i) g(p_i)``; ``f(x, t)`` and ``g(x, t)`` take arrays."""
    if rule.params != params:
        raise ConfigurationError("rule was built for different parameters")
    return rule.integrate(np.asarray(f(rule.x, rule.t)) * np.asarray(g(rule.x, rule.t)))


def integrate(f: Callable, rule: DomainRule) -> float:
    return rule.apply(f)
