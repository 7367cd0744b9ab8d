import json
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from conekit import conefourier as cf
from conekit import conekernels as ck
from conekit import scalar1d as s1
from conekit.acceptance import random_points
from conekit.conebasis import basis, basis_values
from conekit.errors import ConfigurationError, ContractError, ParameterDomainError
from conekit.quaddomains import ConeParams, ConePoint, cone_rule

SOLID = ConeParams(2, 0.5, 0, 0.5)
SURF = ConeParams(2, 0.5, -1, 0.0, "surface_jacobi")
ONE_G = lambda u: np.ones_like(u)  # noqa: E731
ONE_F = lambda x, t: np.ones_like(t)  # noqa: E731
SMOOTH = lambda x, t: np.exp(t) * np.cos(x[:, 0])  # noqa: E731


def rel(a, b):
    return np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(1.0, np.abs(b)))


def element_fn(e):
    return lambda x, t: e.evaluate(x, t)


# ---------------------------------------------------------------- Lambda_n and translation

@pytest.mark.parametrize("prm", [SOLID, SURF])
def test_lambda_of_zonal_is_kronecker(prm):
    lam = cf.critical_index(prm)
    assert lam == pytest.approx(prm.critical_index)
    for k in range(6):
        g = lambda u, k=k: s1.zonal(2 * k, lam, u)  # noqa: E731
        for n in range(6):
            assert abs(cf.lambda_n(g, n, prm) - (n == k)) <= 1e-9


def test_lambda_against_adaptive_integral():
    lam = SOLID.critical_index
    g = lambda u: np.exp(u * u)  # noqa: E731
    w = lambda u: (1 - u * u) ** (lam - 0.5)  # noqa: E731
    den = integrate.quad(w, -1, 1)[0]
    for n in range(4):
        c = s1.gegenbauer(2 * n, lam, 1.0)
        num = integrate.quad(lambda u: g(u) * s1.gegenbauer(2 * n, lam, u) / c * w(u), -1, 1)[0]
        assert cf.lambda_n(g, n, SOLID) == pytest.approx(num / den, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("prm", [SOLID, SURF, ConeParams(3, 0.0, 1.0, -0.5)])
def test_translate_constant_and_zonal(prm):
    rng = np.random.default_rng(0)
    p, q = random_points(prm, 10, rng), random_points(prm, 10, rng)
    assert np.allclose(cf.translate(ONE_G, p, q, prm), 1.0, atol=1e-13)
    lam = prm.critical_index
    for n in (1, 3):
        z = lambda u, n=n: s1.zonal(2 * n, lam, u)  # noqa: E731
        assert rel(cf.translate(z, p, q, prm), ck.kernel_basis_sum(prm, n, "P", p, q)) <= 1e-9


def test_translate_eigen_action():
    rng = np.random.default_rng(1)
    prm = SOLID
    g = lambda u: 1 + u ** 2 - 0.5 * u ** 4  # noqa: E731
    rule = cone_rule(prm, 8)
    p = random_points(prm, 5, rng)
    tg = cf.translate(g, p, (rule.x, rule.t), prm, outer=True)
    for e in basis(prm, 3):
        lhs = (tg * rule.normalized_weights) @ e.evaluate(rule.x, rule.t)
        rhs = cf.lambda_n(g, e.n, prm) * e.evaluate(*p)
        assert rel(lhs, rhs) <= 1e-8


def test_translate_rejects_odd_and_laguerre():
    rng = np.random.default_rng(2)
    p = random_points(SOLID, 3, rng)
    with pytest.raises(ContractError):
        cf.translate(lambda u: u, p, p, SOLID)
    with pytest.raises(ContractError):
        cf.check_even(lambda u: u ** 2 + 1e-6 * u ** 3)
    cf.check_even(np.cos)
    with pytest.raises(ParameterDomainError):
        cf.translate(ONE_G, p, p, ConeParams(2, 0.5, 0, 0, "cone_laguerre"))


# ---------------------------------------------------------------- convolution

@pytest.mark.parametrize("prm", [SOLID, SURF])
def test_convolution_identities(prm):
    rng = np.random.default_rng(3)
    pts = random_points(prm, 6, rng)
    rule = cone_rule(prm, 8)
    assert np.allclose(cf.convolve(ONE_F, ONE_G, prm, pts, rule), 1.0, atol=1e-12)
    lam = prm.critical_index
    els = basis(prm, 3)
    for n in range(4):
        z = lambda u, n=n: s1.zonal(2 * n, lam, u)  # noqa: E731
        f = lambda x, t: sum(basis_values(prm, els, x, t))  # noqa: E731
        lhs = cf.convolve(f, z, prm, pts, rule, nodes=n + 2)
        rhs = cf.project(f, n, prm, rule, pts)
        assert rel(lhs, rhs) <= 1e-7


def test_projection_of_convolution():
    rng = np.random.default_rng(4)
    prm = SOLID
    g = lambda u: 2 - u ** 2 + u ** 4  # noqa: E731
    f = lambda x, t: t ** 2 + x[:, 0] * t - 0.5 * x[:, 1] ** 2  # noqa: E731
    rule = cone_rule(prm, 8)
    pts = random_points(prm, 5, rng)
    fg = lambda x, t: cf.convolve(f, g, prm, (x, t), rule, nodes=5)  # noqa: E731
    for n in range(3):
        lhs = cf.project(fg, n, prm, rule, pts)
        rhs = cf.lambda_n(g, n, prm) * cf.project(f, n, prm, rule, pts)
        assert rel(lhs, rhs) <= 1e-7


# ---------------------------------------------------------------- projections and partial sums

def test_projection_of_basis_elements():
    rng = np.random.default_rng(5)
    prm = SOLID
    rule = cone_rule(prm, 12)
    pts = random_points(prm, 8, rng)
    assert np.allclose(cf.project(ONE_F, 0, prm, rule, pts), 1.0)
    for e in [e for e in basis(prm, 4) if e.inner == 0]:
        for n in range(5):
            got = cf.project(element_fn(e), n, prm, rule, pts)
            ref = e.evaluate(*pts) if n == e.n else 0.0
            assert rel(got, ref) <= 1e-9


@pytest.mark.parametrize("prm", [SOLID, SURF])
def test_projection_routes_agree(prm):
    rng = np.random.default_rng(6)
    rule = cone_rule(prm, 24)
    pts = random_points(prm, 8, rng)
    f = lambda x, t: np.exp(t)  # noqa: E731
    for n in range(7):
        a = cf.project(f, n, prm, rule, pts)
        for route in ("kernel_basis", "kernel"):
            assert rel(cf.project(f, n, prm, rule, pts, route=route), a) <= 1e-8


def test_projection_idempotent():
    rng = np.random.default_rng(7)
    rule = cone_rule(SOLID, 16)
    pts = random_points(SOLID, 6, rng)
    for n in range(4):
        pf = lambda x, t, n=n: cf.project(SMOOTH, n, SOLID, rule, (x, t))  # noqa: E731
        assert rel(cf.project(pf, n, SOLID, rule, pts), pf(*pts)) <= 1e-8


def test_projection_order_check():
    rng = np.random.default_rng(8)
    with pytest.raises(ConfigurationError):
        cf.project(lambda x, t: t ** 6, 2, SOLID, cone_rule(SOLID, 4), random_points(SOLID, 2, rng), degree=6)


def test_parseval_and_dump():
    rule = cone_rule(SOLID, 20)
    ec = cf.expansion_coefficients(SMOOTH, 6, SOLID, rule)
    assert ec.parseval_sum() <= ec.f_norm2 + 1e-8
    assert ec.residual_norm >= 0
    poly = lambda x, t: t ** 3 - x[:, 0] * t  # noqa: E731
    ec2 = cf.expansion_coefficients(poly, 3, SOLID, rule)
    assert ec2.parseval_sum() == pytest.approx(ec2.f_norm2, rel=1e-12)
    data = json.loads(ec.to_json())
    assert {"params", "coeffs", "residual_norm"} <= set(data)


@pytest.mark.parametrize("prm", [SOLID, SURF])
def test_partial_sum_reproduces_polynomials(prm):
    rng = np.random.default_rng(9)
    rule = cone_rule(prm, 12)
    pts = random_points(prm, 8, rng)
    f = lambda x, t: 1 + t ** 2 - x[:, 0] * t + x[:, 1] ** 3  # noqa: E731
    for n in (3, 5):
        assert rel(cf.cesaro_partial_sum(f, n, None, prm, rule, pts), f(*pts)) <= 1e-9


def test_cesaro_routes_and_positivity():
    rng = np.random.default_rng(10)
    prm = SOLID
    rule = cone_rule(prm, 16)
    pts = random_points(prm, 200, rng, (0, 1))
    f = lambda x, t: (x[:, 0] - 0.2) ** 2 * np.exp(-t)  # noqa: E731
    delta = prm.critical_index + 1
    a = cf.cesaro_partial_sum(f, 6, delta, prm, rule, pts)
    b = cf.cesaro_partial_sum(f, 6, delta, prm, rule, pts, route="kernel_basis")
    c = cf.cesaro_partial_sum(f, 6, delta, prm, rule, pts, route="kernel")
    assert rel(b, a) <= 1e-8 and rel(c, a) <= 1e-8
    assert np.min(a) >= -1e-9


# ---------------------------------------------------------------- Lebesgue functions

def test_lebesgue_degree_zero():
    with warnings.catch_warnings():
        warnings.simplefilter("error", cf.NumericWarning)
        assert cf.lebesgue_function(ConePoint([0.1, 0.0], 0.5), 0, 0.0, SOLID) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("prm", [ConeParams(2, 0.5, 0, 0.5), ConeParams(2, 0.5, -1, 0.0, "surface_jacobi")])
def test_lebesgue_apex_matches_1d_reduction(prm):
    apex = ConePoint(np.zeros(2), 0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", cf.NumericWarning)
        full = cf.lebesgue_function(apex, 4, None, prm)
    assert full == pytest.approx(cf.apex_lebesgue(prm, 4, None), rel=1e-3)


def test_apex_lebesgue_methods_agree():
    a, g = 2 * SOLID.alpha, SOLID.gamma
    exact = cf.apex_lebesgue(SOLID, 8, None)
    # brute force: adaptive quadrature of |k_n| split at its sign changes
    k = lambda s: abs(s1.jacobi_kernel(8, a, g, 1 - 2 * s, 1.0)) * s ** a * (1 - s) ** g  # noqa: E731
    num = integrate.quad(k, 0, 1, limit=400, epsabs=1e-13)[0]
    den = integrate.quad(lambda s: s ** a * (1 - s) ** g, 0, 1)[0]
    assert exact == pytest.approx(num / den, rel=1e-7)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", cf.NumericWarning)
        assert cf.apex_lebesgue(SOLID, 8, None, method="refine") == pytest.approx(exact, rel=1e-4)


def test_lebesgue_trend():
    prm = ConeParams(2, 0.5, 0, -0.5)
    lam = prm.critical_index
    above = cf.apex_lebesgue(prm, 64, lam + 0.5) / cf.apex_lebesgue(prm, 16, lam + 0.5)
    below = cf.apex_lebesgue(prm, 64, lam - 0.5) / cf.apex_lebesgue(prm, 16, lam - 0.5)
    assert above < 1.05
    assert below > 1.2


def test_lebesgue_warns_when_budget_blocks_refinement():
    with pytest.warns(cf.NumericWarning, match="last values"):
        cf.lebesgue_function(ConePoint([0.1, 0.0], 0.5), 6, None, SOLID, max_nodes=3000)


# ---------------------------------------------------------------- norm inequalities

def test_young_trivial_and_invalid():
    lhs, rhs = cf.check_young(ONE_F, ONE_G, 1, 1, 1, SOLID)
    assert lhs == pytest.approx(1.0, rel=1e-12) and rhs == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ParameterDomainError):
        cf.check_young(ONE_F, ONE_G, 1, 2, 2, SOLID)
    with pytest.raises(ParameterDomainError):
        cf.check_young(ONE_F, ONE_G, 0.5, 1, 1, SOLID)


@settings(max_examples=6, deadline=None)
@given(c=st.floats(0.2, 1.5), a=st.floats(-1, 1), qr=st.sampled_from([(2.0, 1.0), (1.0, 2.0), (1.5, 1.25)]))
def test_young_inequality(c, a, qr):
    q, r = qr
    p = 1 / (1 / q + 1 / r - 1)
    f = lambda x, t: 1 + a * t + x[:, 0] * np.exp(t)  # noqa: E731
    g = lambda u: np.exp(c * u * u) - a * u ** 4  # noqa: E731
    lhs, rhs = cf.check_young(f, g, p, q, r, SOLID, nodes=8)
    assert lhs <= rhs * (1 + 1e-6)


@pytest.mark.parametrize("prm", [SOLID, SURF])
def test_translation_norm_bound(prm):
    rng = np.random.default_rng(11)
    g = lambda u: np.cos(4 * u) + 0.3  # noqa: E731
    x, t = random_points(prm, 5, rng)
    for xi, ti in zip(x, t):
        lhs, rhs = cf.translation_norm_bound(g, ConePoint(xi, ti), prm)
        assert lhs <= rhs * (1 + 1e-6)
