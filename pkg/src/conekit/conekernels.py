"""Reproducing, partial-sum and Cesaro kernels on the cone and its surface.

Three independent routes are provided:

``basis_sum``
    explicit sum over an orthogonal basis.
``triangle_integral``
    the 1-D kernel on the triangle ``{|u| <= t <= 1}`` evaluated at a
    collapsed first argument and integrated over the auxiliary variables.
``closed_form``
    a single Gegenbauer polynomial ``Z_{2n}^{2 alpha+gamma+1}`` of a scalar
    argument ``xi``, integrated over the auxiliary variables and two more
    variables ``v1, v2``.

All auxiliary integrals use unit-mass Gauss rules.  When a Gegenbauer
exponent sits at its boundary value the rule becomes the two-point average
``(f(1) + f(-1)) / 2``.

Every route reduces to a scalar ``w = s * zeta`` built from the auxiliary
variables (``zeta`` being the collapsed first coordinate on the triangle),
so the apex is handled without dividing by ``s`` or ``t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import scalar1d as s1
from .conebasis import basis_of_degree, basis_values
from .errors import CapabilityError, ConfigurationError, GeometryError, ParameterDomainError
from .quaddomains import ConeParams, ConePoint

__all__ = [
    "ROUTES",
    "KernelRequest",
    "kernel_basis_sum",
    "kernel_basis_matrix",
    "triangle_kernel_diag",
    "triangle_kernel_closed",
    "kernel_triangle",
    "kernel_closed",
    "kernel_fourpoint_d2",
    "resolve_fourpoint_constant",
    "summability_kernel",
    "translation_rule",
    "translation_arguments",
    "translate_values",
    "apex_kernel",
    "evaluate_kernel",
]

ROUTES = ("basis_sum", "triangle_integral", "closed_form", "fourpoint_d2")
_XI_TOL = 1e-12


@dataclass(frozen=True)
class KernelRequest:
    """Which kernel, by which route, at which quadrature order."""

    params: ConeParams
    n: int
    kind: str = "P"  # "P", "K" or "Kdelta"
    route: str = "basis_sum"
    delta: float | None = None
    quad_order: int | None = None

    def __post_init__(self):
        if self.kind not in ("P", "K", "Kdelta"):
            raise ParameterDomainError(f"unknown kernel kind {self.kind!r}")
        if self.route not in ROUTES:
            raise ParameterDomainError(f"unknown route {self.route!r}")
        if self.kind == "Kdelta" and self.delta is None:
            raise ParameterDomainError("Kdelta needs a Cesaro order delta")
        if self.quad_order is not None and self.quad_order < self.n + 1:
            raise ConfigurationError(f"quad_order {self.quad_order} < n+1 = {self.n + 1}")


# ---------------------------------------------------------------------------
# helpers


def _as_points(params: ConeParams, p) -> tuple[np.ndarray, np.ndarray]:
    """Stack ConePoint(s) or an ``(x, t)`` pair into arrays ``(N, d)`` and ``(N,)``."""
    if isinstance(p, ConePoint):
        p.check(params)
        return np.array([p.x]), np.array([p.t])
    if isinstance(p, (list, tuple)) and p and isinstance(p[0], ConePoint):
        for q in p:
            q.check(params)
        return np.array([q.x for q in p]), np.array([q.t for q in p])
    x, t = p
    x = np.asarray(x, dtype=float).reshape(-1, params.d)
    t = np.asarray(t, dtype=float).reshape(-1)
    return x, t


def _weights_from(n: int, kind: str = "P", delta: float | None = None) -> np.ndarray:
    """Per-degree weights: ``P_n`` picks degree n, ``K_n`` sums, ``K_n^delta`` is Cesaro-weighted."""
    if kind == "P":
        w = np.zeros(n + 1)
        w[n] = 1.0
        return w
    if kind == "K":
        return np.ones(n + 1)
    if kind == "Kdelta":
        return s1.cesaro_weights(n, delta)
    raise ParameterDomainError(f"unknown kernel kind {kind!r}")


# ---------------------------------------------------------------------------
# basis route


def kernel_basis_matrix(params: ConeParams, n: int, p, q, kind: str = "P",
                        delta: float | None = None) -> np.ndarray:
    """Matrix ``[K(p_i, q_j)]`` by summing over the orthogonal basis."""
    xp, tp = _as_points(params, p)
    xq, tq = _as_points(params, q)
    cw = _weights_from(n, kind, delta)
    out = np.zeros((len(tp), len(tq)))
    for k in range(n + 1):
        if cw[k] == 0:
            continue
        els = basis_of_degree(params, k)
        vp = basis_values(params, els, xp, tp)
        vq = basis_values(params, els, xq, tq)
        inv = cw[k] / np.array([e.norm for e in els])
        out += (vp * inv[:, None]).T @ vq
    return out


def kernel_basis_sum(params: ConeParams, n: int, kind: str, p, q, delta: float | None = None):
    """``P_n``, ``K_n`` or ``K_n^delta`` at pairs ``(p_i, q_i)`` by the basis route."""
    if params.d not in (1, 2, 3):
        raise CapabilityError(f"basis sums are available for d in {{1, 2, 3}}, got {params.d}")
    xp, tp = _as_points(params, p)
    xq, tq = _as_points(params, q)
    if len(tp) != len(tq):
        raise ConfigurationError("point lists differ in length")
    cw = _weights_from(n, kind, delta)
    out = np.zeros(len(tp))
    for k in range(n + 1):
        if cw[k] == 0:
            continue
        els = basis_of_degree(params, k)
        vp = basis_values(params, els, xp, tp)
        vq = basis_values(params, els, xq, tq)
        inv = cw[k] / np.array([e.norm for e in els])
        out += np.sum(vp * vq * inv[:, None], axis=0)
    return float(out[0]) if isinstance(p, ConePoint) else out


# ---------------------------------------------------------------------------
# the triangle kernel


def _triangle_coeffs(alpha: float, gamma: float, n: int, t, s) -> np.ndarray:
    """``P_{n-m}(1-2t) P_{n-m}(1-2s) / H_{m,n}`` for m = 0..n; shape ``(n+1,) + t.shape``."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    out = np.empty((n + 1,) + np.broadcast_shapes(t.shape, s.shape))
    for m in range(n + 1):
        a = 2 * alpha + 2 * m
        pt = s1.jacobi_all(n - m, a, gamma, 1 - 2 * t)[n - m]
        ps = s1.jacobi_all(n - m, a, gamma, 1 - 2 * s)[n - m]
        h = s1.jacobi_const(2 * alpha, gamma) / s1.jacobi_const(a, gamma) * s1.jacobi_norm(n - m, a, gamma)
        out[m] = pt * ps / h
    return out


def _triangle_sum(alpha: float, gamma: float, n: int, w, t, s) -> np.ndarray:
    """``sum_m c_m (ts)^m Z_m^alpha(w/(ts))`` with ``w = s * zeta``; broadcasts."""
    w, t, s = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (w, t, s)))
    c = _triangle_coeffs(alpha, gamma, n, t, s)
    z = s1.zonal_homogeneous_all(n, alpha, w, t * s)
    return np.sum(c * z, axis=0)


def triangle_kernel_diag(alpha: float, gamma: float, n: int, point, s: float) -> float:
    """Kernel on the triangle for ``(t^2-u^2)^(alpha-1/2)(1-t)^gamma`` at ``((u,t), (s,s))``."""
    u, t = point
    if not (abs(u) <= t + 1e-14 and 0 <= t <= 1 and 0 <= s <= 1):
        raise GeometryError(f"point ({u}, {t}) or s = {s} outside the triangle")
    if not (alpha > -0.5 and gamma > -1):
        raise ParameterDomainError("need alpha > -1/2 and gamma > -1")
    return float(_triangle_sum(alpha, gamma, n, u * s, t, s))


def _v_axes(alpha: float, gamma: float, nodes: int):
    return s1.gegenbauer_weight_rule(alpha - 0.5, nodes), s1.gegenbauer_weight_rule(gamma, nodes)


def _check_xi(xi):
    worst = float(np.max(np.abs(xi))) if np.size(xi) else 0.0
    if worst > 1 + _XI_TOL:
        raise GeometryError(f"closed-form argument |xi| = {worst} exceeds 1")


def _xi_from_w(w, t, s, v1, v2):
    """``v1 sqrt((st + w)/2) + v2 sqrt(1-t) sqrt(1-s)`` with last axes for v1, v2."""
    a2 = np.maximum((s * t + w) / 2, 0.0)
    b = np.sqrt(np.maximum(1 - t, 0.0) * np.maximum(1 - s, 0.0))
    return np.sqrt(a2)[..., None, None] * v1[:, None] + np.asarray(b)[..., None, None] * v2[None, :]


def triangle_kernel_closed(alpha: float, gamma: float, n: int, point, s: float,
                           nodes: int | None = None) -> float:
    """Same kernel as :func:`triangle_kernel_diag` by the double Gegenbauer integral."""
    u, t = point
    if not (alpha >= 0 and gamma >= -0.5):
        raise ParameterDomainError("closed triangle formula needs alpha >= 0, gamma >= -1/2")
    r1, r2 = _v_axes(alpha, gamma, nodes or n + 2)
    xi = _xi_from_w(np.asarray(u * s), np.asarray(t), np.asarray(s), r1.nodes, r2.nodes)
    _check_xi(xi)
    z = s1.zonal_all(2 * n, 2 * alpha + gamma + 1, xi)[2 * n]
    return float(np.einsum("ij,i,j->", z, r1.weights, r2.weights))


# ---------------------------------------------------------------------------
# translation structure shared by the triangle and closed-form routes


@dataclass(frozen=True)
class _Outer:
    """Auxiliary-variable rule producing ``w`` from ``(<x,y>, R, st)``."""

    case: str
    nodes: tuple[np.ndarray, ...]
    weights: np.ndarray

    def w(self, xy, r, st):
        """``w`` with a trailing axis over the auxiliary nodes."""
        xy, r, st = (np.asarray(v, dtype=float)[..., None] for v in (xy, r, st))
        if self.case == "solid0":
            (u,) = self.nodes
            return xy + r * u
        if self.case == "solid":
            u, z1, z2 = self.nodes
            return (1 - z1) / 2 * (xy + r * u) + (1 + z1) / 2 * z2 * st
        if self.case == "surface":
            z1, z2 = self.nodes
            return (1 - z1) / 2 * xy + (1 + z1) / 2 * z2 * st
        return xy + 0 * st


def _tensor(*rules):
    grids = np.meshgrid(*[r.nodes for r in rules], indexing="ij")
    w = rules[0].weights
    for r in rules[1:]:
        w = np.multiply.outer(w, r.weights)
    return tuple(g.ravel() for g in grids), np.asarray(w).ravel()


def translation_rule(params: ConeParams, nodes: int) -> tuple[_Outer, float]:
    """Auxiliary rule and the triangle parameter ``alpha`` for a Jacobi family."""
    if params.laguerre:
        raise CapabilityError("closed-form kernels exist for the Jacobi families only")
    d, mu, beta = params.d, params.mu, params.beta
    if d < 2:
        raise CapabilityError("closed-form kernels need d >= 2; use the triangle kernel for d = 1")
    if params.solid:
        if mu < 0 or beta < 0:
            raise ParameterDomainError(f"solid closed forms need mu >= 0 and beta >= 0, got {mu}, {beta}")
        ru = s1.gegenbauer_weight_rule(mu - 0.5, nodes)
        if beta == 0:
            g, w = _tensor(ru)
            return _Outer("solid0", g, w), params.alpha
        rz1 = s1.gauss_rule(s1.WeightSpec.jacobi(mu + (d - 1) / 2, beta / 2 - 1), nodes)
        rz2 = s1.gegenbauer_weight_rule(beta / 2, nodes)
        g, w = _tensor(ru, rz1, rz2)
        return _Outer("solid", g, w), params.alpha
    if beta < -1:
        raise ParameterDomainError(f"surface closed forms need beta >= -1, got {beta}")
    if beta == -1:
        return _Outer("surface_m1", (np.zeros(1),), np.ones(1)), params.alpha
    rz1 = s1.gauss_rule(s1.WeightSpec.jacobi((d - 2) / 2, (beta - 1) / 2), nodes)
    rz2 = s1.gegenbauer_weight_rule((beta + 1) / 2, nodes)
    g, w = _tensor(rz1, rz2)
    return _Outer("surface", g, w), params.alpha


def _pair_scalars(params: ConeParams, xp, tp, xq, tq):
    """``<x,y>``, ``R = sqrt(t^2-|x|^2) sqrt(s^2-|y|^2)`` and broadcasting ``t, s``."""
    xy = np.einsum("...i,...i->...", xp, xq)
    if params.solid:
        rp = np.sqrt(np.maximum(tp * tp - np.sum(xp * xp, axis=-1), 0.0))
        rq = np.sqrt(np.maximum(tq * tq - np.sum(xq * xq, axis=-1), 0.0))
        r = rp * rq
    else:
        r = np.zeros_like(xy)
    return xy, r


def _pairs(params, p, q, outer: bool):
    xp, tp = _as_points(params, p)
    xq, tq = _as_points(params, q)
    if outer:
        xp, tp = xp[:, None, :], tp[:, None]
        xq, tq = xq[None, :, :], tq[None, :]
    elif len(tp) != len(tq):
        raise ConfigurationError("point lists differ in length")
    xy, r = _pair_scalars(params, xp, tp, xq, tq)
    t, s = np.broadcast_arrays(tp, tq)
    return xy, r, t, s


def _closed_params_check(params: ConeParams):
    if params.jacobi and params.gamma < -0.5:
        raise ParameterDomainError(f"closed forms need gamma >= -1/2, got {params.gamma}")


def translation_arguments(params: ConeParams, p, q, nodes: int, outer: bool = False):
    """Closed-form arguments ``xi`` and their unit-mass weights.

    Returns ``(xi, weights)`` where ``xi`` has shape ``pairs + (G,)`` and
    ``weights`` has shape ``(G,)``.
    """
    _closed_params_check(params)
    rule, alpha = translation_rule(params, nodes)
    r1, r2 = _v_axes(alpha, params.gamma, nodes)
    xy, r, t, s = _pairs(params, p, q, outer)
    w = rule.w(xy, r, s * t)
    xi = _xi_from_w(w, t[..., None], s[..., None], r1.nodes, r2.nodes)
    weights = np.multiply.outer(rule.weights, np.outer(r1.weights, r2.weights)).ravel()
    xi = xi.reshape(xi.shape[:-3] + (-1,))
    _check_xi(xi)
    return xi, weights


def translate_values(params: ConeParams, g: Callable, p, q, nodes: int, outer: bool = False,
                     chunk: int = 2_000_000):
    """``T g(p, q)`` for a vectorized ``g``; pairs or (``outer``) all combinations."""
    xp, tp = _as_points(params, p)
    xq, tq = _as_points(params, q)
    rule, _ = translation_rule(params, nodes)
    g_size = len(rule.weights) * nodes * nodes
    if outer:
        out = np.empty((len(tp), len(tq)))
        step = max(1, chunk // max(1, g_size * len(tp)))
        for j in range(0, len(tq), step):
            xi, w = translation_arguments(params, (xp, tp), (xq[j:j + step], tq[j:j + step]), nodes, True)
            out[:, j:j + step] = np.asarray(g(xi)) @ w
        return out
    out = np.empty(len(tp))
    step = max(1, chunk // max(1, g_size))
    for i in range(0, len(tp), step):
        sl = slice(i, i + step)
        xi, w = translation_arguments(params, (xp[sl], tp[sl]), (xq[sl], tq[sl]), nodes)
        out[sl] = np.asarray(g(xi)) @ w
    return out


def _degree_weights_fn(params: ConeParams, n: int, weights: np.ndarray) -> Callable:
    """``g(xi) = sum_k c_k Z_{2k}^lam(xi)``, the 1-D kernel pushed through ``T``."""
    lam = params.critical_index

    def g(xi):
        z = s1.zonal_all(2 * n, lam, xi)
        return np.tensordot(weights, z[0::2], axes=(0, 0))

    return g


def kernel_closed(params: ConeParams, n: int, p, q, kind: str = "P", delta: float | None = None,
                  nodes: int | None = None, outer: bool = False):
    """Closed-form route: ``T`` applied to ``Z_{2n}^{2 alpha+gamma+1}``.

    ``K_n`` and ``K_n^delta`` use the (Cesaro-weighted) sum of ``Z_{2k}``,
    which equals the 1-D Jacobi kernel ``k_n(w_{2alpha+gamma+1/2,-1/2}; 2 xi^2-1, 1)``.
    """
    nodes = nodes or n + 2
    if nodes < n + 1:
        raise ConfigurationError(f"need at least n+1 = {n + 1} nodes per axis")
    cw = _weights_from(n, kind, delta)
    vals = translate_values(params, _degree_weights_fn(params, n, cw), p, q, nodes, outer)
    return float(vals[0]) if isinstance(p, ConePoint) and not outer else vals


def kernel_triangle(params: ConeParams, n: int, p, q, kind: str = "P", delta: float | None = None,
                    nodes: int | None = None):
    """Triangle route: the triangle kernel sum integrated over the auxiliary variables."""
    if params.laguerre:
        raise CapabilityError("the triangle route exists for the Jacobi families only")
    nodes = nodes or n + 2
    rule, alpha = translation_rule(params, nodes)
    xy, r, t, s = _pairs(params, p, q, outer=False)
    w = rule.w(xy, r, s * t)
    cw = _weights_from(n, kind, delta)
    out = np.zeros(t.shape)
    for k in range(n + 1):
        if cw[k]:
            out += cw[k] * (_triangle_sum(alpha, params.gamma, k, w, t[..., None], s[..., None]) @ rule.weights)
    return float(out[0]) if isinstance(p, ConePoint) else out


# ---------------------------------------------------------------------------
# d = 2 surface, four-point formula


def _fourpoint_terms(n: int, p: ConePoint, q: ConePoint, variant: str) -> float:
    params = ConeParams(2, 0.5, -1.0, -0.5, "surface_jacobi")
    p.check(params)
    q.check(params)
    st = p.t * q.t
    xy = float(np.dot(p.x, q.x))
    ap = math.sqrt(max((st + xy) / 2, 0.0))
    b = math.sqrt(max(1 - p.t, 0.0) * max(1 - q.t, 0.0))
    if variant == "limit":
        args = [ap + b, -ap + b, ap - b, -ap - b]
    elif variant == "printed":
        am = math.sqrt(max((st - xy) / 2, 0.0))
        args = [ap + b, -am + b, ap - b, -am - b]
    else:
        raise ParameterDomainError(f"unknown four-point variant {variant!r}")
    return float(np.sum(s1.zonal_all(2 * n, 0.5, np.array(args))[2 * n]))


def resolve_fourpoint_constant(variant: str = "limit") -> float:
    """Constant ``C`` making the four-term sum equal 1 at ``n = 0``."""
    p = ConePoint([0.3, 0.4], 0.5)
    return 1.0 / _fourpoint_terms(0, p, p, variant)


def kernel_fourpoint_d2(n: int, p: ConePoint, q: ConePoint, variant: str = "limit",
                        constant: float | None = None) -> float:
    """Kernel of the d = 2 surface with ``beta = -1``, ``gamma = -1/2`` from four ``Z^{1/2}`` values.

    ``variant="limit"`` uses ``+-sqrt((st+<x,y>)/2) +- sqrt(1-t)sqrt(1-s)``;
    ``variant="printed"`` uses ``sqrt((st-<x,y>)/2)`` in two of the terms.
    """
    c = resolve_fourpoint_constant(variant) if constant is None else constant
    return c * _fourpoint_terms(n, p, q, variant)


# ---------------------------------------------------------------------------
# summability kernels


def apex_kernel(params: ConeParams, n: int, s, delta: float | None = None):
    """``k_n^delta(w_{2 alpha, gamma}; 1-2s, 1)``, the kernel with one point at the apex."""
    if params.laguerre:
        raise CapabilityError("apex reduction implemented for the Jacobi families")
    return s1.jacobi_kernel(n, 2 * params.alpha, params.gamma, 1 - 2 * np.asarray(s, dtype=float), 1.0, delta)


def summability_kernel(params: ConeParams, n: int, delta: float | None, p, q,
                       route: str = "closed_form", nodes: int | None = None):
    """``K_n`` (delta None) or ``K_n^delta``, by ``closed_form`` (translation) or ``basis_sum``."""
    kind = "K" if delta is None else "Kdelta"
    if route == "basis_sum":
        return kernel_basis_sum(params, n, kind, p, q, delta)
    if route == "closed_form":
        return kernel_closed(params, n, p, q, kind, delta, nodes)
    if route == "triangle_integral":
        return kernel_triangle(params, n, p, q, kind, delta, nodes)
    raise ParameterDomainError(f"unknown route {route!r}")


def evaluate_kernel(request: KernelRequest, p, q):
    r = request
    if r.route == "basis_sum":
        return kernel_basis_sum(r.params, r.n, r.kind, p, q, r.delta)
    if r.route == "closed_form":
        return kernel_closed(r.params, r.n, p, q, r.kind, r.delta, r.quad_order)
    if r.route == "triangle_integral":
        return kernel_triangle(r.params, r.n, p, q, r.kind, r.delta, r.quad_order)
    prm = r.params
    if not (prm.surface and prm.d == 2 and prm.beta == -1 and prm.gamma == -0.5):
        raise ParameterDomainError("fourpoint_d2 needs the d = 2 surface with beta = -1, gamma = -1/2")
    if r.kind != "P":
        cw = _weights_from(r.n, r.kind, r.delta)
        return sum(c * kernel_fourpoint_d2(k, p, q) for k, c in enumerate(cw) if c)
    return kernel_fourpoint_d2(r.n, p, q)
