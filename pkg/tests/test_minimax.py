import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opparallel.exceptions import InputError
from opparallel.generators import ginibre, random_unitary
from opparallel.linalg import DEFAULT_TOL, adjoint
from opparallel.minimax import OptResult, UnimodularScalar, max_over_circle, min_over_plane, sphere_sup_M

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def norm(A):
    return np.linalg.norm(A, 2)


def circle_oracle(A, B, points=4096):
    th = 2 * np.pi * np.arange(points) / points
    return max(norm(A + np.exp(1j * t) * B) for t in th)


def plane_oracle(A, B, points=200):
    """Dense disk grid, then one refinement grid around the best point."""
    R = 2 * norm(A) / norm(B)
    xs = np.linspace(-R, R, points)
    best, arg = np.inf, 0j
    for x in xs:
        for y in xs:
            if x * x + y * y <= R * R:
                v = norm(A + (x + 1j * y) * B)
                if v < best:
                    best, arg = v, x + 1j * y
    h = xs[1] - xs[0]
    fine = np.linspace(-h, h, 41)
    for x in fine:
        for y in fine:
            v = norm(A + (arg + x + 1j * y) * B)
            best = min(best, v)
    return best


def test_unimodular_scalar():
    u = UnimodularScalar(-np.pi / 2)
    assert 0 <= u.theta < 2 * np.pi and abs(abs(u.value) - 1) == 0.0
    assert UnimodularScalar.from_complex(-2.0).value == pytest.approx(-1.0)


def test_circle_examples():
    T = ginibre(3, 3, 0)
    r = max_over_circle(T, T)
    assert r.value == pytest.approx(2 * norm(T), rel=1e-12) and r.argument == 1
    r = max_over_circle(np.diag([1.0, 0.0]), np.eye(2))
    assert r.value == pytest.approx(2.0, abs=1e-12) and r.argument == 1


@pytest.mark.parametrize("seed", range(5))
def test_circle_against_grid_oracle(seed):
    rng = np.random.default_rng(seed)
    A, B = ginibre(4, 4, rng), ginibre(4, 4, rng)
    oracle = circle_oracle(A, B)
    r = max_over_circle(A, B)
    scale = norm(A) + norm(B)
    assert r.value >= oracle - 1e-12
    # the oracle grid itself may miss by ||B|| h^2 / 8
    assert r.value - oracle <= DEFAULT_TOL.opt_tol * scale + norm(B) * (2 * np.pi / 4096) ** 2 / 8
    assert 0 <= r.certified_gap <= DEFAULT_TOL.opt_tol * scale
    assert abs(norm(A + r.argument * B) - r.value) <= 1e-12 * scale


def test_circle_shape_mismatch():
    with pytest.raises(InputError):
        max_over_circle(np.eye(2), np.eye(3))


def test_circle_zero_second_argument_is_degenerate():
    r = max_over_circle(np.eye(2), np.zeros((2, 2)))
    assert r.degenerate and r.value == pytest.approx(1.0) and r.argument == 1


def test_plane_examples():
    T = ginibre(3, 3, 1)
    r = min_over_plane(T, T)
    assert r.value <= 1e-7 and abs(r.argument + 1) <= 1e-6
    r = min_over_plane(np.eye(2), np.diag([1.0, -1.0]))
    assert r.value == pytest.approx(1.0, abs=1e-9) and r.argument == 0
    r = min_over_plane(np.eye(2), np.zeros((2, 2)))
    assert r.degenerate and r.value == pytest.approx(1.0) and r.argument == 0


@pytest.mark.parametrize("seed", range(3))
def test_plane_against_grid_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    A, B = ginibre(4, 4, rng), ginibre(4, 4, rng)
    oracle = plane_oracle(A, B)
    r = min_over_plane(A, B)
    assert r.value <= oracle + DEFAULT_TOL.opt_tol * norm(A)
    assert abs(norm(A + r.argument * B) - r.value) <= 1e-12 * norm(A)


def test_sphere_examples():
    T = ginibre(3, 3, 2)
    assert sphere_sup_M(T, T) <= 1e-12
    assert sphere_sup_M(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_sphere_meets_plane_squared(seed):
    rng = np.random.default_rng(200 + seed)
    A, B = ginibre(3, 3, rng), ginibre(3, 3, rng)
    assert abs(sphere_sup_M(A, B) - min_over_plane(A, B).value ** 2) <= 1e-5


def test_optresult_dict():
    d = OptResult(1j, 2.0, 3, 0.0).to_dict()
    assert d["value"] == 2.0 and d["iterations"] == 3


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_plane_convexity_and_scaling(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    A, B = ginibre(n, n, rng), ginibre(n, n, rng)
    m1, m2 = (complex(*rng.standard_normal(2)) for _ in range(2))
    g = lambda m: norm(A + m * B)
    assert g((m1 + m2) / 2) <= (g(m1) + g(m2)) / 2 + 1e-9
    c = complex(*rng.standard_normal(2))
    lhs = min_over_plane(c * A, B).value
    rhs = abs(c) * min_over_plane(A, B).value
    assert abs(lhs - rhs) <= DEFAULT_TOL.opt_tol * (1 + abs(c) * norm(A)) * 10


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_circle_invariances(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    A, B = ginibre(n, n, rng), ginibre(n, n, rng)
    U = random_unitary(n, rng)
    base = max_over_circle(A, B).value
    tol = DEFAULT_TOL.opt_tol * (norm(A) + norm(B))
    assert abs(max_over_circle(adjoint(A), adjoint(B)).value - base) <= tol
    assert abs(max_over_circle(U @ A, U @ B).value - base) <= tol
    assert base <= norm(A) + norm(B) + 1e-9
