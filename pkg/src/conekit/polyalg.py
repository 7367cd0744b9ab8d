"""Sparse multivariate polynomials in ``(x_1, ..., x_d, t)``.

A polynomial is an immutable map from exponent tuples ``(a_1, ..., a_d, a_t)``
to float coefficients.  Terms are kept in graded-lex order with ``t`` last so
that equality, hashing and text output are deterministic.
"""
from __future__ import annotations

import re
from typing import Mapping, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DegreeError, ParameterDomainError, ShapeError

__all__ = [
    "MVPoly",
    "arith",
    "differentiate",
    "evaluate",
    "evaluate_many",
    "compose_univariate",
    "homogenize_ball_poly",
    "laplacian_x",
    "euler",
    "allclose",
]


def _order_key(exp: tuple[int, ...]):
    return (sum(exp), tuple(-a for a in exp))


class MVPoly:
    """Immutable polynomial in ``d`` x-variables and ``t``."""

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[tuple[int, ...], float] | None = None):
        if dim < 0:
            raise ShapeError("dimension must be >= 0")
        self.dim = int(dim)
        items = []
        for exp, c in (terms or {}).items():
            exp = tuple(int(a) for a in exp)
            if len(exp) != dim + 1 or min(exp) < 0:
                raise ShapeError(f"exponent {exp} invalid for dim {dim}")
            c = float(c)
            if c != 0.0:
                items.append((exp, c))
        items.sort(key=lambda kv: _order_key(kv[0]))
        self._terms = dict(items)
        self._hash = None

    # construction ------------------------------------------------------

    @classmethod
    def constant(cls, dim: int, c: float) -> "MVPoly":
        return cls(dim, {(0,) * (dim + 1): c})

    @classmethod
    def var(cls, dim: int, which: int | str) -> "MVPoly":
        """``x_i`` for ``which = i`` (1-based) or ``"x<i>"``; ``t`` for ``"t"``."""
        idx = _var_index(dim, which)
        exp = [0] * (dim + 1)
        exp[idx] = 1
        return cls(dim, {tuple(exp): 1.0})

    @classmethod
    def from_univariate_t(cls, dim: int, coeffs) -> "MVPoly":
        """``sum_k c_k t^k``."""
        coeffs = coeffs.coef if isinstance(coeffs, Polynomial) else coeffs
        return cls(dim, {(0,) * dim + (k,): c for k, c in enumerate(coeffs)})

    # inspection --------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, ...], float]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def is_homogeneous(self, m: int) -> bool:
        return all(sum(e) == m for e in self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MVPoly):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, tuple(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        body = " + ".join(self.to_text().splitlines()) or "0"
        return f"MVPoly(dim={self.dim}, {body})"

    # arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "MVPoly":
        if isinstance(other, MVPoly):
            if other.dim != self.dim:
                raise ShapeError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other
        if np.isscalar(other):
            return MVPoly.constant(self.dim, float(other))
        return NotImplemented

    def __add__(self, other) -> "MVPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0.0) + c
        return MVPoly(self.dim, out)

    __radd__ = __add__

    def __neg__(self) -> "MVPoly":
        return MVPoly(self.dim, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "MVPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "MVPoly":
        return (-self) + other

    def __mul__(self, other) -> "MVPoly":
        if np.isscalar(other):
            return self.scale(float(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[tuple[int, ...], float] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        return MVPoly(self.dim, out)

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> "MVPoly":
        return self.scale(1.0 / float(c))

    def __pow__(self, k: int) -> "MVPoly":
        if k < 0:
            raise ParameterDomainError("negative power")
        out = MVPoly.constant(self.dim, 1.0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c: float) -> "MVPoly":
        return MVPoly(self.dim, {e: c * v for e, v in self._terms.items()})

    def prune(self, tol: float) -> "MVPoly":
        """Drop coefficients with ``|c| <= tol * max|c|``."""
        cut = tol * self.max_abs_coeff()
        return MVPoly(self.dim, {e: c for e, c in self._terms.items() if abs(c) > cut})

    # calculus and evaluation -------------------------------------------

    def diff(self, which: int | str) -> "MVPoly":
        return differentiate(self, which)

    def __call__(self, x, t):
        return evaluate(self, x, t)

    # text --------------------------------------------------------------

    def to_text(self) -> str:
        """One ``coeff * x1^a1 ... t^k`` line per term, canonical order."""
        lines = []
        names = [f"x{i + 1}" for i in range(self.dim)] + ["t"]
        for exp, c in self._terms.items():
            factors = [n if a == 1 else f"{n}^{a}" for n, a in zip(names, exp) if a]
            lines.append(" * ".join([repr(c)] + factors))
        return "\n".join(lines)

    @classmethod
    def from_text(cls, dim: int, text: str) -> "MVPoly":
        terms: dict[tuple[int, ...], float] = {}
        for line in text.strip().splitlines():
            line = line.strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split("*")]
            c = float(parts[0])
            exp = [0] * (dim + 1)
            for f in parts[1:]:
                m = re.fullmatch(r"(x\d+|t)(?:\^(\d+))?", f)
                if not m:
                    raise ShapeError(f"bad factor {f!r}")
                exp[_var_index(dim, m.group(1))] += int(m.group(2) or 1)
            e = tuple(exp)
            terms[e] = terms.get(e, 0.0) + c
        return cls(dim, terms)


def _var_index(dim: int, which: int | str) -> int:
    if isinstance(which, str):
        if which == "t":
            return dim
        if which.startswith("x"):
            which = int(which[1:])
        else:
            raise ShapeError(f"unknown variable {which!r}")
    if not 1 <= which <= dim:
        raise ShapeError(f"variable x{which} invalid for dim {dim}")
    return which - 1


def arith(op: str, p: MVPoly, q) -> MVPoly:
    """``add``, ``sub``, ``mul`` or ``scale``."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "scale":
        return p.scale(float(q))
    raise ParameterDomainError(f"unknown op {op!r}")


def differentiate(p: MVPoly, which: int | str) -> MVPoly:
    """Exact partial derivative in ``x_i`` (1-based index or ``"x<i>"``) or ``"t"``."""
    idx = _var_index(p.dim, which)
    out = {}
    for e, c in p.items():
        a = e[idx]
        if a:
            ne = list(e)
            ne[idx] = a - 1
            out[tuple(ne)] = c * a
    return MVPoly(p.dim, out)


def laplacian_x(p: MVPoly) -> MVPoly:
    out = MVPoly(p.dim)
    for i in range(1, p.dim + 1):
        out = out + differentiate(differentiate(p, i), i)
    return out


def euler(p: MVPoly, include_t: bool = True) -> MVPoly:
    """``<x, grad_x> p`` (plus ``t d/dt p`` if ``include_t``), computed termwise."""
    out = {}
    for e, c in p.items():
        k = sum(e[:-1]) + (e[-1] if include_t else 0)
        if k:
            out[e] = c * k
    return MVPoly(p.dim, out)


def _split_point(dim: int, x, t):
    x = np.asarray(x, dtype=float)
    if dim == 0:
        x = x.reshape(np.shape(t) + (0,))
    if x.shape[-1] != dim:
        raise ShapeError(f"point has {x.shape[-1]} coordinates, expected {dim}")
    t = np.asarray(t, dtype=float)
    return x, t


def evaluate_many(polys: Sequence[MVPoly], x, t) -> np.ndarray:
    """Evaluate several polynomials at the same points; shape ``(len(polys),) + t.shape``.

    A shared table of variable powers is built once; each term is then a
    product of table lookups.
    """
    if not polys:
        return np.empty((0,) + np.shape(t))
    dim = polys[0].dim
    x, t = _split_point(dim, x, t)
    shape = np.broadcast_shapes(x.shape[:-1], t.shape)
    cols = [np.broadcast_to(x[..., i], shape) for i in range(dim)] + [np.broadcast_to(t, shape)]
    top = [0] * (dim + 1)
    for p in polys:
        if p.dim != dim:
            raise ShapeError("mixed dimensions")
        for e in p._terms:
            top = [max(a, b) for a, b in zip(top, e)]
    tables = []
    for v, k in zip(cols, top):
        tab = np.empty((k + 1,) + shape)
        tab[0] = 1.0
        for j in range(1, k + 1):
            tab[j] = tab[j - 1] * v
        tables.append(tab)
    out = np.zeros((len(polys),) + shape)
    for i, p in enumerate(polys):
        acc = np.zeros(shape)
        for e, c in p._terms.items():
            term = np.full(shape, c)
            for tab, a in zip(tables, e):
                if a:
                    term = term * tab[a]
            acc += term
        out[i] = acc
    return out


def evaluate(p: MVPoly, x, t):
    """Value of ``p`` at ``(x, t)``; ``x`` has trailing axis of length ``d``."""
    out = evaluate_many([p], x, t)[0]
    return float(out) if out.ndim == 0 else out


def compose_univariate(coeffs, q: MVPoly) -> MVPoly:
    """``p(q)`` for ``p`` given by ascending coefficients (or a numpy Polynomial), by Horner."""
    if isinstance(coeffs, Polynomial):
        coeffs = coeffs.coef
    coeffs = list(np.atleast_1d(np.asarray(coeffs, dtype=float)))
    out = MVPoly.constant(q.dim, coeffs[-1])
    for c in reversed(coeffs[:-1]):
        out = out * q + c
    return out


def homogenize_ball_poly(p: MVPoly, m: int) -> MVPoly:
    """``t^m p(x/t)``: maps ``x^a`` to ``x^a t^(m-|a|)``."""
    out = {}
    for e, c in p.items():
        if e[-1]:
            raise ShapeError("homogenize_ball_poly expects a polynomial in x only")
        k = sum(e)
        if k > m:
            raise DegreeError(f"term of degree {k} exceeds target degree {m}")
        out[e[:-1] + (m - k,)] = c
    return MVPoly(p.dim, out)


def allclose(p: MVPoly, q: MVPoly, rtol: float = 1e-12, atol: float = 0.0) -> bool:
    """Coefficient-wise comparison relative to the larger max coefficient."""
    diff = (p - q).max_abs_coeff()
    return diff <= atol + rtol * max(p.max_abs_coeff(), q.max_abs_coeff())
