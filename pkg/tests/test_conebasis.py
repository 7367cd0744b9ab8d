import json
import math

import numpy as np
import pytest
from scipy import integrate, special

from conekit.conebasis import (basis, basis_element, basis_norm, basis_values, degree_dimension, dump_basis_json,
                               gram_matrix)
from conekit.errors import BasisIndexError, CapabilityError, ConfigurationError
from conekit.harmonics import harmonic_basis
from conekit.polyalg import evaluate
from conekit.quaddomains import ConeParams, cone_rule

SOLID = ConeParams(2, 0.5, 0, 0.5)


def radial_norm_oracle(a, g, k, m):
    """Closed-form norm rebuilt with adaptive quadrature in t.

    With orthonormal angular factors the squared norm is
    int P_k^{(a+2m,g)}(1-2t)^2 t^(a+2m) (1-t)^g dt / int t^a (1-t)^g dt.
    """
    num = integrate.quad(lambda t: special.eval_jacobi(k, a + 2 * m, g, 1 - 2 * t) ** 2
                         * t ** (a + 2 * m) * (1 - t) ** g, 0, 1, limit=200)[0]
    den = integrate.quad(lambda t: t ** a * (1 - t) ** g, 0, 1, limit=200)[0]
    return num / den


def test_element_examples():
    assert basis_element(SOLID, 0, 0).poly.terms == {(0, 0, 0): 1.0}
    q = basis_element(SOLID, 1, 0)
    a = 2 * SOLID.alpha
    assert q.poly.degree == 1
    assert all(e[:2] == (0, 0) for e, _ in q.poly.items())
    t = np.linspace(0, 1, 7)
    assert np.allclose(evaluate(q.poly, np.zeros((7, 2)), t), special.eval_jacobi(1, a, 0.5, 1 - 2 * t))


def test_surface_element_restriction():
    rng = np.random.default_rng(0)
    for prm in (ConeParams(2, 0.5, -1, 0.0, "surface_jacobi"), ConeParams(3, 0.5, 0.5, 1.0, "surface_jacobi")):
        for n, m in ((3, 1), (4, 2), (5, 5)):
            for inner in range(len(harmonic_basis(prm.d, m))):
                e = basis_element(prm, n, m, inner)
                xi = rng.normal(size=(20, prm.d))
                xi /= np.linalg.norm(xi, axis=1)[:, None]
                t = rng.uniform(0, 1, 20)
                x = xi * t[:, None]
                y = evaluate(harmonic_basis(prm.d, m)[inner].poly, xi, np.zeros(20))
                ref = special.eval_jacobi(n - m, 2 * m + prm.beta + prm.d - 1, prm.gamma, 1 - 2 * t) * t ** m * y
                assert np.max(np.abs(evaluate(e.poly, x, t) - ref)) <= 1e-12 * max(1, np.max(np.abs(ref)))


def test_index_errors():
    with pytest.raises(BasisIndexError):
        basis_element(SOLID, 2, 3)
    with pytest.raises(BasisIndexError):
        basis_element(SOLID, 2, 1, 5)
    with pytest.raises(CapabilityError):
        _ = basis_element(ConeParams(4, 0.5, 0, 0), 1, 0).poly


@pytest.mark.parametrize("prm", [SOLID, ConeParams(3, 1.5, 1, -0.5), ConeParams(2, 0.5, -1, 0, "surface_jacobi"),
                                 ConeParams(3, 0.5, 1, 1, "surface_jacobi")])
def test_norms_against_oracle(prm):
    a = 2 * prm.alpha
    assert basis_norm(prm, 0, 0) == pytest.approx(1.0)
    for n in range(7):
        for m in range(n + 1):
            assert basis_norm(prm, n, m) == pytest.approx(radial_norm_oracle(a, prm.gamma, n - m, m), rel=1e-9)


@pytest.mark.parametrize("fam", ["cone_laguerre", "surface_laguerre"])
def test_laguerre_norms(fam):
    prm = ConeParams(2, 0.5, 0 if fam == "cone_laguerre" else -1, 0, fam)
    a = 2 * prm.alpha
    for n in range(6):
        for m in range(n + 1):
            k = n - m
            ref = math.exp(special.gammaln(a + 2 * m + k + 1) - special.gammaln(k + 1) - special.gammaln(a + 1))
            assert basis_norm(prm, n, m) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("prm", [SOLID, ConeParams(3, 0.0, 1, -0.5), ConeParams(2, 1.5, 0, 1, "cone_laguerre"),
                                 ConeParams(2, 0.5, -1, 0, "surface_jacobi"),
                                 ConeParams(3, 0.5, 0, -0.5, "surface_jacobi"),
                                 ConeParams(3, 0.5, 1, 0, "surface_laguerre"), ConeParams(1, 0.5, 0, 0.5)])
def test_gram_identity(prm):
    g = gram_matrix(prm, 6, cone_rule(prm, 14))
    off = g - np.diag(np.diag(g))
    assert np.max(np.abs(off)) <= 1e-10
    assert np.max(np.abs(np.diag(g) - 1)) <= 1e-11


def test_gram_requires_order():
    with pytest.raises(ConfigurationError):
        gram_matrix(SOLID, 4, cone_rule(SOLID, 6))


def test_dimension_counts():
    for n in range(8):
        assert degree_dimension(SOLID, n) == math.comb(n + 2, 2)
        assert sum(degree_dimension(SOLID, k) for k in range(n + 1)) == math.comb(n + 3, n)
        for d in (2, 3):
            surf = ConeParams(d, 0.5, -1, 0, "surface_jacobi")
            expected = math.comb(n + d - 1, n) + (math.comb(n + d - 2, n - 1) if n >= 1 else 0)
            assert degree_dimension(surf, n) == expected
            assert len([e for e in basis(surf, n) if e.n == n]) == expected


def test_apex_and_degree():
    for prm in (SOLID, ConeParams(3, 0.5, 1, 0), ConeParams(2, 0.5, -1, 0, "surface_jacobi")):
        els = basis(prm, 6)
        vals = basis_values(prm, els, np.zeros((1, prm.d)), np.zeros(1))[:, 0]
        assert np.all(np.isfinite(vals))
        for e, v in zip(els, vals):
            assert e.poly.degree == e.n
            assert v == pytest.approx(evaluate(e.poly, np.zeros(prm.d), 0.0), abs=1e-12)


def test_factored_evaluation_matches_poly():
    rng = np.random.default_rng(6)
    prm = ConeParams(3, 1.5, 1, -0.5)
    els = basis(prm, 5)
    t = rng.uniform(0, 1, 30)
    x = rng.normal(size=(30, 3))
    x *= (t * rng.uniform(0, 1, 30) / np.linalg.norm(x, axis=1))[:, None]
    fast = basis_values(prm, els, x, t)
    slow = np.array([evaluate(e.poly, x, t) for e in els])
    assert np.max(np.abs(fast - slow)) <= 1e-11 * max(1.0, np.max(np.abs(slow)))


def test_dump_json():
    data = json.loads(dump_basis_json(basis(SOLID, 2)))
    assert len(data) == 1 + 3 + 6
    assert {"family", "params", "n", "m", "inner", "norm", "poly"} <= set(data[0])
