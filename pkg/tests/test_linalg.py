import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opparallel.exceptions import DomainError, InputError, NumericError
from opparallel.generators import ginibre, random_psd
from opparallel.linalg import (
    Tolerances,
    adjoint,
    check_matrix,
    eigvals_qr,
    eigvecs,
    max_singular_triplet,
    op_norm,
    psd_sqrt,
    rank_one,
    schatten_norm,
    spectral_radius,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_op_norm_examples():
    assert op_norm([[0, 1], [0, 0]]) == pytest.approx(1.0, abs=1e-15)
    assert op_norm(np.eye(2)) == pytest.approx(1.0, abs=1e-15)
    # characteristic polynomial of A^*A for [[1,1],[0,1]]: t^2 - 3t + 1
    assert op_norm([[1, 1], [0, 1]]) == pytest.approx((1 + np.sqrt(5)) / 2, abs=1e-12)


def test_op_norm_rejects_bad_input():
    with pytest.raises(InputError):
        op_norm([[np.nan, 0], [0, 1]])
    with pytest.raises(InputError):
        op_norm(np.zeros((0, 3)))
    with pytest.raises(InputError):
        op_norm([1.0, 2.0])


def test_spectral_radius_examples():
    assert spectral_radius([[0, 1], [0, 0]]) == 0.0
    assert spectral_radius(np.diag([2.0, -3.0])) == pytest.approx(3.0, abs=1e-14)
    assert spectral_radius([[0, 1], [-1, 0]]) == pytest.approx(1.0, abs=1e-14)


def test_spectral_radius_non_square():
    with pytest.raises(InputError):
        spectral_radius(np.ones((2, 3)))


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16, 33, 64])
def test_eigvals_qr_matches_lapack(n):
    rng = np.random.default_rng(n)
    A = ginibre(n, n, rng)
    ours = np.sort_complex(eigvals_qr(A))
    ref = np.sort_complex(np.linalg.eigvals(A))
    # match as multisets: nearest-neighbour distances
    d = np.abs(ours[:, None] - ref[None, :]).min(axis=1)
    assert d.max() <= 1e-9 * (1 + np.abs(ref).max())


def test_eigvals_qr_structured():
    # permutation (all eigenvalues on the unit circle) and a Jordan block
    P = np.roll(np.eye(6), 1, axis=0)
    assert np.allclose(np.sort(np.abs(eigvals_qr(P))), 1.0, atol=1e-12)
    J = np.eye(4, k=1) * 1.0 + 2.0 * np.eye(4)
    assert np.allclose(eigvals_qr(J), 2.0, atol=1e-3)


def test_eigvals_qr_budget_error_carries_residual():
    A = ginibre(6, 6, np.random.default_rng(3))
    with pytest.raises(NumericError) as info:
        eigvals_qr(A, max_sweeps=1)
    assert info.value.residual > 0


def test_eigvecs_are_eigenvectors():
    A = ginibre(5, 5, np.random.default_rng(11))
    lam = eigvals_qr(A)
    V = eigvecs(A, lam)
    assert np.max(np.abs(A @ V - V * lam)) <= 1e-9


def test_psd_sqrt_examples():
    assert np.allclose(psd_sqrt(np.eye(2)), np.eye(2), atol=1e-14)
    assert np.allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)
    B = psd_sqrt(np.array([[2.0, 1.0], [1.0, 2.0]]))
    for val, vec in ((1.0, [1, -1]), (np.sqrt(3.0), [1, 1])):
        v = np.array(vec) / np.sqrt(2)
        assert np.allclose(B @ v, val * v, atol=1e-12)


def test_psd_sqrt_clamps_roundoff_and_rejects_negative():
    A = np.diag([1.0, -5e-10])
    assert np.allclose(psd_sqrt(A), np.diag([1.0, 0.0]))
    with pytest.raises(DomainError):
        psd_sqrt(np.diag([1.0, -1e-6]))
    with pytest.raises(DomainError):
        psd_sqrt(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_schatten_norm_examples():
    for n in (1, 3, 5):
        for p in (1.0, 1.5, 2.0, 3.0):
            assert schatten_norm(np.eye(n), p) == pytest.approx(n ** (1 / p), rel=1e-14)
    assert schatten_norm(np.diag([3.0, 4.0]), 1) == pytest.approx(7.0, rel=1e-15)
    assert schatten_norm([[1, 1], [0, 1]], 2) == pytest.approx(np.sqrt(3.0), rel=1e-14)
    with pytest.raises(DomainError):
        schatten_norm(np.eye(2), 0.5)


def test_max_singular_triplet():
    s, u, v = max_singular_triplet(np.diag([3.0, 1.0]))
    assert s == pytest.approx(3.0)
    assert abs(abs(u[0]) - 1) < 1e-14 and abs(abs(v[0]) - 1) < 1e-14
    rng = np.random.default_rng(5)
    xi, eta = (x / np.linalg.norm(x) for x in ginibre(4, 2, rng).T)
    s, u, v = max_singular_triplet(rank_one(xi, eta))
    assert s == pytest.approx(1.0, abs=1e-14)
    assert abs(abs(np.vdot(u, xi)) - 1) < 1e-12 and abs(abs(np.vdot(v, eta)) - 1) < 1e-12
    A = ginibre(5, 5, rng)
    s, u, v = max_singular_triplet(A)
    assert np.linalg.norm(A @ v - s * u) <= 1e-9 * (1 + s)
    with pytest.raises(DomainError):
        max_singular_triplet(np.zeros((2, 2)))


def test_tolerances_validation():
    Tolerances()
    for bad in ({"lin_tol": 0.0}, {"opt_tol": -1.0}, {"dec_rel": 1.0}, {"sample_budget": 0},
                {"seed": -1}, {"lin_tol": float("nan")}):
        with pytest.raises(InputError):
            Tolerances(**bad)
    t = Tolerances(seed=3)
    assert t.rng(1).integers(1 << 30) == Tolerances(seed=3).rng(1).integers(1 << 30)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_norm_invariants(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 7))
    A = ginibre(n, n, rng)
    c = complex(*rng.standard_normal(2))
    assert abs(op_norm(adjoint(A)) - op_norm(A)) <= 1e-9
    assert abs(op_norm(c * A) - abs(c) * op_norm(A)) <= 1e-9 * (1 + abs(c) * op_norm(A))
    assert spectral_radius(A) <= op_norm(A) + 1e-9
    assert abs(schatten_norm(A, 2) ** 2 - np.trace(adjoint(A) @ A).real) <= 1e-9 * (1 + op_norm(A) ** 2)
    assert schatten_norm(A, 1.5) >= op_norm(A) - 1e-12
    xi, eta = rng.standard_normal(n) + 0j, rng.standard_normal(n) + 0j
    assert abs(op_norm(rank_one(xi, eta)) - np.linalg.norm(xi) * np.linalg.norm(eta)) <= 1e-9 * (
        1 + np.linalg.norm(xi) * np.linalg.norm(eta))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_psd_sqrt_of_square(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    B = random_psd(n, rng)
    B = 0.5 * (B + adjoint(B)) / max(1.0, op_norm(B))
    assert np.max(np.abs(psd_sqrt(B @ B) - B)) <= 10 * 1e-9 * (1 + op_norm(B)) * 10
    R = psd_sqrt(B)
    assert np.linalg.norm(R @ R - B, 2) <= 10 * 1e-9 * (1 + op_norm(B))


def test_check_matrix_converts_real():
    A = check_matrix([[1, 2], [3, 4]])
    assert A.dtype == complex
