import numpy as np
import pytest
from scipy import special

from conekit import conekernels as ck
from conekit import scalar1d as s1
from conekit.acceptance import random_points
from conekit.conebasis import basis, basis_values
from conekit.errors import CapabilityError, GeometryError, ParameterDomainError
from conekit.quaddomains import ConeParams, ConePoint, cone_rule

SOLID = ConeParams(2, 0.5, 0, 0.5)
SURF = ConeParams(2, 0.5, -1, -0.5, "surface_jacobi")


def rel(a, b):
    return np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(1.0, np.abs(b)))


def surface_point(rng, d=2):
    t = rng.uniform(0.05, 1.0)
    v = rng.normal(size=d)
    return ConePoint(t * v / np.linalg.norm(v), t)


def apex_oracle(a, g, n, s, delta=None):
    """k_n^delta(w_{a,g}; 1-2s, 1) summed term by term with scipy Jacobi values."""
    w = s1.cesaro_weights(n, delta)
    return sum(w[k] * special.eval_jacobi(k, a, g, 1 - 2 * s) * special.eval_jacobi(k, a, g, 1.0)
               / s1.jacobi_norm(k, a, g) for k in range(n + 1))


# ---------------------------------------------------------------- basic properties

@pytest.mark.parametrize("prm", [SOLID, ConeParams(3, 0.0, 1.0, -0.5), SURF,
                                 ConeParams(3, 0.5, 0.5, 0.0, "surface_jacobi")])
def test_degree_zero_is_one(prm):
    rng = np.random.default_rng(0)
    p, q = random_points(prm, 10, rng), random_points(prm, 10, rng)
    assert np.allclose(ck.kernel_basis_sum(prm, 0, "P", p, q), 1.0, atol=1e-14)
    assert np.allclose(ck.kernel_closed(prm, 0, p, q), 1.0, atol=1e-13)


def test_symmetry():
    rng = np.random.default_rng(1)
    p, q = random_points(SOLID, 10, rng), random_points(SOLID, 10, rng)
    assert np.array_equal(ck.kernel_basis_sum(SOLID, 5, "P", p, q), ck.kernel_basis_sum(SOLID, 5, "P", q, p))
    assert rel(ck.kernel_closed(SOLID, 5, p, q), ck.kernel_closed(SOLID, 5, q, p)) <= 1e-12


@pytest.mark.parametrize("prm", [SOLID, ConeParams(2, 0.0, 0, -0.5), ConeParams(3, 1.5, 0, 1.0),
                                 ConeParams(2, 0.5, 0.5, 0.0), ConeParams(3, 0.0, 1.0, 0.0),
                                 SURF, ConeParams(3, 0.5, 1.0, 0.5, "surface_jacobi"),
                                 ConeParams(3, 0.5, -1.0, 0.0, "surface_jacobi")])
def test_closed_form_matches_basis_sum(prm):
    rng = np.random.default_rng(2)
    p, q = random_points(prm, 20, rng), random_points(prm, 20, rng)
    for n in (1, 3, 6):
        assert rel(ck.kernel_closed(prm, n, p, q), ck.kernel_basis_sum(prm, n, "P", p, q)) <= 1e-8


@pytest.mark.parametrize("prm", [SOLID, ConeParams(3, 0.0, 0, -0.5)])
def test_triangle_route_matches_basis_sum(prm):
    rng = np.random.default_rng(3)
    p, q = random_points(prm, 20, rng), random_points(prm, 20, rng)
    for n in (2, 5):
        assert rel(ck.kernel_triangle(prm, n, p, q), ck.kernel_basis_sum(prm, n, "P", p, q)) <= 1e-8


@pytest.mark.parametrize("prm", [SOLID, SURF])
def test_reproducing_property(prm):
    rng = np.random.default_rng(4)
    n = 4
    rule = cone_rule(prm, 2 * n + 2)
    p = random_points(prm, 6, rng)
    kern = ck.kernel_closed(prm, n, p, (rule.x, rule.t), outer=True)
    els = [e for e in basis(prm, n) if e.n == n]
    q_rule = basis_values(prm, els, rule.x, rule.t)
    q_pts = basis_values(prm, els, *p)
    repro = (kern * rule.normalized_weights) @ q_rule.T
    assert rel(repro, q_pts.T) <= 1e-8


def test_partial_sum_kernel_is_sum_of_projections():
    rng = np.random.default_rng(5)
    p, q = random_points(SOLID, 10, rng), random_points(SOLID, 10, rng)
    total = sum(ck.kernel_basis_sum(SOLID, k, "P", p, q) for k in range(6))
    assert rel(ck.kernel_basis_sum(SOLID, 5, "K", p, q), total) <= 1e-12
    assert rel(ck.summability_kernel(SOLID, 5, None, p, q), total) <= 1e-9


# ---------------------------------------------------------------- triangle kernels

@pytest.mark.parametrize("alpha,gamma", [(0.5, 0.0), (0.0, -0.5), (1.5, 1.0), (1.0, 0.5)])
def test_triangle_diag_matches_d1_basis(alpha, gamma):
    rng = np.random.default_rng(6)
    prm = ConeParams(1, alpha, 0.0, gamma)
    assert prm.alpha == alpha
    for n in range(7):
        for _ in range(5):
            t = rng.uniform(0.05, 1)
            u = rng.uniform(-t, t)
            s = rng.uniform(0, 1)
            ref = ck.kernel_basis_sum(prm, n, "P", (np.array([[u]]), np.array([t])), (np.array([[s]]), np.array([s])))
            val = ck.triangle_kernel_diag(alpha, gamma, n, (u, t), s)
            assert abs(val - ref[0]) <= 1e-10 * max(1.0, abs(ref[0]))
            closed = ck.triangle_kernel_closed(alpha, gamma, n, (u, t), s)
            assert abs(closed - val) <= 1e-8 * max(1.0, abs(val))


def test_triangle_diag_degree_zero_and_apex():
    assert ck.triangle_kernel_diag(0.5, 0.0, 0, (0.1, 0.4), 0.3) == pytest.approx(1.0)
    assert np.isfinite(ck.triangle_kernel_diag(0.5, 0.0, 4, (0.0, 0.0), 0.3))


# ---------------------------------------------------------------- arguments

@pytest.mark.parametrize("prm", [SOLID, ConeParams(3, 0.5, 1.0, 0.0), SURF,
                                 ConeParams(3, 0.5, 0.5, 0.0, "surface_jacobi")])
def test_argument_bound(prm):
    rng = np.random.default_rng(7)
    p, q = random_points(prm, 1000, rng, (0, 1)), random_points(prm, 1000, rng, (0, 1))
    xi, _ = ck.translation_arguments(prm, p, q, 3)
    assert np.max(np.abs(xi)) <= 1 + 1e-12


# ---------------------------------------------------------------- four-point formula

def test_fourpoint_constant_and_degree_zero():
    c = ck.resolve_fourpoint_constant()
    assert c == pytest.approx(0.25, abs=1e-15)
    rng = np.random.default_rng(8)
    p, q = surface_point(rng), surface_point(rng)
    assert ck.kernel_fourpoint_d2(0, p, q) == pytest.approx(1.0, abs=1e-15)


def test_fourpoint_matches_basis_sum():
    rng = np.random.default_rng(9)
    for _ in range(20):
        p, q = surface_point(rng), surface_point(rng)
        for n in range(11):
            ref = float(ck.kernel_basis_sum(SURF, n, "P", p, q))
            assert abs(ck.kernel_fourpoint_d2(n, p, q) - ref) <= 1e-9 * max(1.0, abs(ref))
    p = surface_point(rng)
    for n in range(11):
        ref = float(ck.kernel_basis_sum(SURF, n, "P", p, p))
        assert abs(ck.kernel_fourpoint_d2(n, p, p) - ref) <= 1e-9 * max(1.0, abs(ref))


def test_fourpoint_printed_variant_disagrees():
    rng = np.random.default_rng(10)
    p, q = surface_point(rng), surface_point(rng)
    ref = float(ck.kernel_basis_sum(SURF, 4, "P", p, q))
    assert abs(ck.kernel_fourpoint_d2(4, p, q, variant="printed") - ref) > 1e-3


def test_fourpoint_rejects_interior_points():
    with pytest.raises(GeometryError):
        ck.kernel_fourpoint_d2(2, ConePoint([0.1, 0.0], 0.5), ConePoint([0.3, 0.4], 0.5))


# ---------------------------------------------------------------- apex and Cesaro kernels

@pytest.mark.parametrize("prm", [SOLID, ConeParams(3, 0.0, 1.0, -0.5), SURF,
                                 ConeParams(3, 0.5, 0.0, 1.0, "surface_jacobi")])
def test_apex_reduction(prm):
    rng = np.random.default_rng(11)
    q = random_points(prm, 20, rng, (0, 1))
    apex = (np.zeros((20, prm.d)), np.zeros(20))
    a = 2 * prm.alpha
    for n in (0, 4, 9, 16):
        full = ck.kernel_basis_sum(prm, n, "K", apex, q)
        assert rel(full, apex_oracle(a, prm.gamma, n, q[1])) <= 1e-10
        assert rel(ck.apex_kernel(prm, n, q[1]), full) <= 1e-10
    delta = prm.critical_index + 1
    full = ck.kernel_basis_sum(prm, 8, "Kdelta", apex, q, delta)
    assert rel(full, apex_oracle(a, prm.gamma, 8, q[1], delta)) <= 1e-10


@pytest.mark.parametrize("prm", [SOLID, ConeParams(3, 0.5, 0, 0), ConeParams(2, 0.5, -1, 0, "surface_jacobi")])
def test_cesaro_positivity(prm):
    rng = np.random.default_rng(12)
    p, q = random_points(prm, 200, rng, (0, 1)), random_points(prm, 200, rng, (0, 1))
    for n in (4, 10):
        k = ck.summability_kernel(prm, n, prm.critical_index + 1, p, q)
        assert np.min(k) >= -1e-10 * max(1.0, np.max(np.abs(k)))


def test_cesaro_routes_agree():
    rng = np.random.default_rng(13)
    p, q = random_points(SOLID, 20, rng), random_points(SOLID, 20, rng)
    a = ck.summability_kernel(SOLID, 6, 2.5, p, q)
    b = ck.summability_kernel(SOLID, 6, 2.5, p, q, route="basis_sum")
    assert rel(a, b) <= 1e-9


def test_kernel_request_dispatch():
    rng = np.random.default_rng(14)
    p, q = random_points(SOLID, 5, rng), random_points(SOLID, 5, rng)
    for route in ("basis_sum", "triangle_integral", "closed_form"):
        req = ck.KernelRequest(SOLID, 3, "K", route=route)
        assert rel(ck.evaluate_kernel(req, p, q), ck.kernel_basis_sum(SOLID, 3, "K", p, q)) <= 1e-9


def test_errors():
    rng = np.random.default_rng(15)
    p = random_points(SOLID, 3, rng)
    with pytest.raises(ParameterDomainError):
        ck.kernel_closed(ConeParams(2, -0.25, 0, 0), 2, p, p)
    with pytest.raises(ParameterDomainError):
        ck.kernel_closed(ConeParams(2, 0.5, 0, -0.7), 2, p, p)
    with pytest.raises(CapabilityError):
        x = (np.zeros((1, 4)), np.array([0.5]))
        ck.kernel_basis_sum(ConeParams(4, 0.5, 0, 0), 1, "P", x, x)
