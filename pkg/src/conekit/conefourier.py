"""Translation, convolution, projections and Cesaro means on the cone.

The translation operator ``T`` maps an even function ``g`` on ``[-1, 1]``
to a two-point function on the cone (or its surface); it is evaluated with
the same auxiliary quadrature as the closed-form kernels.  Everything else
(convolution, projections, partial sums, Lebesgue functions, Young norms)
integrates over a :class:`~conekit.quaddomains.DomainRule`.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from . import scalar1d as s1
from .conebasis import basis, basis_of_degree, basis_values
from .conekernels import (
    _as_points,
    _weights_from,
    apex_kernel,
    kernel_basis_matrix,
    kernel_closed,
    translate_values,
)
from .errors import ConfigurationError, ContractError, ParameterDomainError
from .quaddomains import ConeParams, ConePoint, DomainRule, cone_rule, cone_rule_size

__all__ = [
    "NumericWarning",
    "ExpansionCoefficients",
    "critical_index",
    "lambda_n",
    "translate",
    "check_even",
    "convolve",
    "project",
    "expansion_coefficients",
    "cesaro_partial_sum",
    "lebesgue_function",
    "apex_lebesgue",
    "check_young",
    "translation_norm_bound",
]


class NumericWarning(UserWarning):
    """Order-doubling refinement did not settle."""


def critical_index(params: ConeParams) -> float:
    """``lambda = 2mu+beta+gamma+d`` (solid) or ``beta+gamma+d`` (surface)."""
    return params.critical_index


def lambda_n(g: Callable, n: int, params: ConeParams, nodes: int = 64) -> float:
    """Eigen-scalar of ``T g``: the Gegenbauer coefficient of ``g`` at index ``2n``."""
    lam = params.critical_index
    rule = s1.gauss_rule(s1.WeightSpec.gegenbauer(lam), max(nodes, 2 * n + 2))
    return s1.gegenbauer_coefficient(g, 2 * n, lam, rule)


def check_even(g: Callable, probes: int = 33, tol: float = 1e-12) -> None:
    """Raise ``ContractError`` if ``g(u)`` and ``g(-u)`` differ on a probe grid."""
    u = np.linspace(0.0, 1.0, probes)
    a = np.asarray(g(u), dtype=float)
    b = np.asarray(g(-u), dtype=float)
    scale = max(1.0, float(np.max(np.abs(a))))
    odd = float(np.max(np.abs(a - b))) / 2
    if odd > tol * scale:
        raise ContractError(f"g is not even: odd part reaches {odd:.3e}")


def _jacobi_only(params: ConeParams):
    if params.laguerre:
        raise ParameterDomainError("the translation operator is defined for the Jacobi families")
    if params.solid and (params.mu < 0 or params.beta < 0):
        raise ParameterDomainError("translation needs mu >= 0 and beta >= 0")
    if params.surface and params.beta < -1:
        raise ParameterDomainError("translation on the surface needs beta >= -1")
    if params.gamma < -0.5:
        raise ParameterDomainError("translation needs gamma >= -1/2")


def translate(g: Callable, p, q, params: ConeParams, nodes: int = 12, outer: bool = False):
    """``T g(p, q)``; exact for even polynomials ``g`` of degree ``<= 2(nodes-1)``."""
    _jacobi_only(params)
    check_even(g)
    vals = translate_values(params, g, p, q, nodes, outer)
    return float(vals[0]) if isinstance(p, ConePoint) and not outer else vals


def _points_arrays(params, points):
    return _as_points(params, points)


def _rule_values(f: Callable, rule: DomainRule) -> np.ndarray:
    return np.broadcast_to(np.asarray(f(rule.x, rule.t), dtype=float), rule.weights.shape)


def convolve(f: Callable, g: Callable, params: ConeParams, points, rule: DomainRule,
             nodes: int = 12) -> np.ndarray:
    """``(f * g)(p) = b int f(q) T g(p, q) W(q) dq`` at each output point."""
    _jacobi_only(params)
    check_even(g)
    if rule.params != params:
        raise ConfigurationError("rule was built for different parameters")
    tg = translate_values(params, g, _points_arrays(params, points), (rule.x, rule.t), nodes, outer=True)
    return tg @ (rule.normalized_weights * _rule_values(f, rule))


def _check_order(rule: DomainRule, params: ConeParams, need: int | None):
    if rule.params != params:
        raise ConfigurationError("rule was built for different parameters")
    if need is not None and rule.exact_degree < need:
        raise ConfigurationError(f"rule exact to degree {rule.exact_degree}, need {need}")


@dataclass
class ExpansionCoefficients:
    """Fourier coefficients ``<f, e> / <e, e>`` keyed by ``(n, m, inner)``."""

    params: ConeParams
    coeffs: dict = field(default_factory=dict)
    norms: dict = field(default_factory=dict)
    f_norm2: float = math.nan

    def degree_slice(self, n: int) -> dict:
        return {k: v for k, v in self.coeffs.items() if k[0] == n}

    def parseval_sum(self) -> float:
        return float(sum(c * c * self.norms[k] for k, c in self.coeffs.items()))

    @property
    def residual_norm(self) -> float:
        """``<f, f> - sum c^2 <e, e>`` (nonnegative up to quadrature error)."""
        return self.f_norm2 - self.parseval_sum()

    def to_json(self) -> str:
        data = {
            "params": self.params.as_dict(),
            "coeffs": [[list(k), v] for k, v in sorted(self.coeffs.items())],
            "residual_norm": self.residual_norm,
        }
        return json.dumps(data, sort_keys=True, indent=1)


def expansion_coefficients(f: Callable, max_degree: int, params: ConeParams, rule: DomainRule,
                           degree: int | None = None) -> ExpansionCoefficients:
    """Coefficients of ``f`` up to ``max_degree``; ``degree`` declares a polynomial ``f``."""
    _check_order(rule, params, None if degree is None else degree + max_degree)
    fv = _rule_values(f, rule)
    els = basis(params, max_degree)
    v = basis_values(params, els, rule.x, rule.t)
    ip = v @ (rule.normalized_weights * fv)
    out = ExpansionCoefficients(params, f_norm2=rule.integrate(fv * fv))
    for e, c in zip(els, ip):
        out.coeffs[(e.n, e.m, e.inner)] = float(c / e.norm)
        out.norms[(e.n, e.m, e.inner)] = e.norm
    return out


def project(f: Callable, n: int, params: ConeParams, rule: DomainRule, points,
            route: str = "coefficients", degree: int | None = None, nodes: int | None = None):
    """``proj_n f`` at ``points``.

    ``coefficients`` sums ``<f, e>/<e, e> e`` over degree-n elements;
    ``kernel`` integrates ``f`` against the closed-form kernel ``P_n``;
    ``kernel_basis`` integrates against the basis-sum kernel.
    """
    _check_order(rule, params, None if degree is None else degree + n)
    xp, tp = _points_arrays(params, points)
    fv = _rule_values(f, rule) * rule.normalized_weights
    if route == "coefficients":
        els = basis_of_degree(params, n)
        v = basis_values(params, els, rule.x, rule.t)
        c = (v @ fv) / np.array([e.norm for e in els])
        return c @ basis_values(params, els, xp, tp)
    if route == "kernel":
        k = kernel_closed(params, n, (xp, tp), (rule.x, rule.t), nodes=nodes, outer=True)
        return k @ fv
    if route == "kernel_basis":
        return kernel_basis_matrix(params, n, (xp, tp), (rule.x, rule.t)) @ fv
    raise ParameterDomainError(f"unknown projection route {route!r}")


def cesaro_partial_sum(f: Callable, n: int, delta: float | None, params: ConeParams, rule: DomainRule,
                       points, route: str = "projections", nodes: int | None = None,
                       degree: int | None = None):
    """``S_n f`` (delta None) or ``S_n^delta f`` at ``points``.

    ``projections`` weights ``proj_k f`` by the Cesaro factors; ``kernel``
    integrates against the translated 1-D kernel; ``kernel_basis`` against
    the basis-sum kernel.
    """
    kind = "K" if delta is None else "Kdelta"
    cw = _weights_from(n, kind, delta)
    _check_order(rule, params, None if degree is None else degree + n)
    xp, tp = _points_arrays(params, points)
    fv = _rule_values(f, rule) * rule.normalized_weights
    if route == "projections":
        out = np.zeros(len(tp))
        for k in range(n + 1):
            els = basis_of_degree(params, k)
            v = basis_values(params, els, rule.x, rule.t)
            c = (v @ fv) / np.array([e.norm for e in els])
            out += cw[k] * (c @ basis_values(params, els, xp, tp))
        return out
    if route == "kernel":
        k = kernel_closed(params, n, (xp, tp), (rule.x, rule.t), kind=kind, delta=delta,
                          nodes=nodes, outer=True)
        return k @ fv
    if route == "kernel_basis":
        return kernel_basis_matrix(params, n, (xp, tp), (rule.x, rule.t), kind, delta) @ fv
    raise ParameterDomainError(f"unknown partial-sum route {route!r}")


def _refine(value_at: Callable[[int], float], start: int, what: str, tol: float = 1e-4,
            max_doublings: int = 6, affordable: Callable[[int], bool] = lambda order: True) -> float:
    """Double the order until two successive values agree to ``tol`` (relative).

    Stops early, with a warning, when ``affordable(order)`` turns false.
    """
    prev = value_at(start)
    last = None
    order = start
    for _ in range(max_doublings):
        if not affordable(2 * order):
            break
        order *= 2
        cur = value_at(order)
        if abs(cur - prev) <= tol * max(abs(cur), 1e-300):
            return cur
        prev, last = cur, prev
    warnings.warn(f"{what}: no convergence at order {order} (last values {last!r}, {prev!r})",
                  NumericWarning, stacklevel=3)
    return prev


def lebesgue_function(p, n: int, delta: float | None, params: ConeParams, order: int | None = None,
                      route: str = "kernel_basis", nodes: int | None = None,
                      max_nodes: int = 10_000_000, chunk: int = 20_000) -> float:
    """``b int |K_n^delta(p, q)| W(q) dq`` with order-doubling refinement.

    ``order`` is the starting total degree of the cone rule (default ``2n+2``);
    refinement stops with a warning once a rule would exceed ``max_nodes``.
    """
    kind = "K" if delta is None else "Kdelta"
    xp, tp = _points_arrays(params, p)
    if len(tp) != 1:
        raise ConfigurationError("lebesgue_function takes a single point")

    def value(deg):
        rule = cone_rule(params, deg)
        w = rule.normalized_weights
        total = 0.0
        for i in range(0, rule.size, chunk):
            q = (rule.x[i:i + chunk], rule.t[i:i + chunk])
            if route == "kernel_basis":
                k = kernel_basis_matrix(params, n, (xp, tp), q, kind, delta)[0]
            else:
                k = kernel_closed(params, n, (xp, tp), q, kind=kind, delta=delta, nodes=nodes, outer=True)[0]
            total += float(np.dot(w[i:i + chunk], np.abs(k)))
        return total

    return _refine(value, order or 2 * n + 2, "lebesgue_function",
                   affordable=lambda deg: cone_rule_size(params, deg) <= max_nodes)


def _sign_changes(f: Callable, samples: int) -> list[float]:
    """Roots of ``f`` on (0, 1) bracketed on a Chebyshev-clustered grid."""
    grid = (1 - np.cos(np.pi * np.arange(samples + 1) / samples)) / 2
    v = f(grid)
    roots = []
    for i in np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]:
        roots.append(brentq(lambda z: float(f(np.array([z]))[0]), grid[i], grid[i + 1], xtol=1e-15))
    return roots


def _weighted_primitive(f: Callable, a: float, g: float, x: np.ndarray, nodes: int) -> np.ndarray:
    """``int_0^x f(s) s^a (1-s)^g ds`` for ``x`` in [0, 1] (``f`` a polynomial).

    Near 0 substitute ``s = x u``; near 1 subtract the tail with ``s = 1 - (1-x) v``,
    so each Gauss rule carries the singular factor and the rest is smooth.
    """
    head = s1.gauss_rule(s1.WeightSpec.jacobi(0.0, a), nodes)  # weight prop. to u^a on u = (1+tau)/2
    tail = s1.gauss_rule(s1.WeightSpec.jacobi(0.0, g), nodes)
    u = (1 + head.nodes) / 2
    v = (1 + tail.nodes) / 2
    total = float(np.dot(tail.weights, f(1 - v) * (1 - v) ** a)) / (g + 1)
    out = np.empty(len(x))
    for i, xi in enumerate(x):
        if xi <= 0.5:
            s = xi * u
            out[i] = xi ** (a + 1) / (a + 1) * float(np.dot(head.weights, f(s) * (1 - s) ** g))
        else:
            s = 1 - (1 - xi) * v
            out[i] = total - (1 - xi) ** (g + 1) / (g + 1) * float(np.dot(tail.weights, f(s) * s ** a))
    return out


def apex_lebesgue(params: ConeParams, n: int, delta: float | None, method: str = "roots",
                  nodes: int | None = None) -> float:
    """Lebesgue function at the apex via the 1-D reduction:
    ``int |k_n^delta(w_{2alpha,gamma}; 1-2s, 1)|`` against the normalized radial weight.

    ``roots`` integrates the polynomial exactly between its sign changes;
    ``refine`` uses order-doubling Gauss rules on ``|k|``.
    """
    a, g = 2 * params.alpha, params.gamma
    k = lambda s: apex_kernel(params, n, s, delta)  # noqa: E731
    if method == "roots":
        pts = np.array([0.0] + _sign_changes(k, 40 * n + 200) + [1.0])
        prim = _weighted_primitive(k, a, g, pts, n + 40)
        return s1.jacobi_const(a, g) * float(np.sum(np.abs(np.diff(prim))))
    if method != "refine":
        raise ParameterDomainError(f"unknown method {method!r}")

    def value(m):
        rule = s1.gauss_rule(s1.WeightSpec.jacobi(a, g), m)
        return rule.integrate(np.abs(k((1 - rule.nodes) / 2)))

    return _refine(value, nodes or n + 2, "apex_lebesgue")


def _lp_norm(vals: np.ndarray, weights: np.ndarray, p: float) -> float:
    if math.isinf(p):
        return float(np.max(np.abs(vals)))
    return float(np.dot(weights, np.abs(vals) ** p)) ** (1.0 / p)


def check_young(f: Callable, g: Callable, p: float, q: float, r: float, params: ConeParams,
                rule: DomainRule | None = None, nodes: int = 10, g_nodes: int = 200) -> tuple[float, float]:
    """``(||f * g||_p, ||f||_q ||g||_r)`` by quadrature; requires ``1/p = 1/r + 1/q - 1``."""
    for v in (p, q, r):
        if not v >= 1:
            raise ParameterDomainError(f"exponents must be >= 1, got {(p, q, r)}")
    inv = lambda v: 0.0 if math.isinf(v) else 1.0 / v  # noqa: E731
    if abs(inv(p) - (inv(r) + inv(q) - 1)) > 1e-12:
        raise ParameterDomainError(f"exponents violate 1/p = 1/r + 1/q - 1: {(p, q, r)}")
    rule = rule or cone_rule(params, 8)
    conv = convolve(f, g, params, (rule.x, rule.t), rule, nodes)
    lhs = _lp_norm(conv, rule.normalized_weights, p)
    fv = _rule_values(f, rule)
    lam = params.critical_index
    gr = s1.gauss_rule(s1.WeightSpec.gegenbauer(lam), g_nodes)
    rhs = _lp_norm(fv, rule.normalized_weights, q) * _lp_norm(np.asarray(g(gr.nodes)), gr.weights, r)
    return lhs, rhs


def translation_norm_bound(g: Callable, p, params: ConeParams, rule: DomainRule | None = None,
                           nodes: int = 12, g_nodes: int = 200) -> tuple[float, float]:
    """``(||T g(p, .)||_1, ||g||_1)`` against the cone weight and ``w_{2alpha+gamma+1}``."""
    _jacobi_only(params)
    check_even(g)
    rule = rule or cone_rule(params, 12)
    tg = translate_values(params, g, _points_arrays(params, p), (rule.x, rule.t), nodes, outer=True)[0]
    lhs = rule.integrate(np.abs(tg))
    gr = s1.gauss_rule(s1.WeightSpec.gegenbauer(params.critical_index), g_nodes)
    return lhs, _lp_norm(np.asarray(g(gr.nodes)), gr.weights, 1.0)
