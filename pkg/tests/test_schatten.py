import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opparallel.exceptions import DomainError
from opparallel.generators import ginibre, random_hermitian, random_psd
from opparallel.parallel import make_parallel_pair
from opparallel.schatten import (
    HermFunctional,
    PExponent,
    clarkson_check,
    jordan_split,
    linear_dependence_test,
    psd_additivity_check,
    schatten_parallel,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def sp(A, p):
    s = np.linalg.svd(A, compute_uv=False)
    return np.sum(s**p) ** (1 / p)


def test_pexponent():
    assert PExponent(1.0).q is None
    pe = PExponent(1.5)
    assert abs(1 / pe.p + 1 / pe.q - 1) <= 1e-12
    with pytest.raises(DomainError):
        PExponent(0.9)


def test_clarkson_examples():
    T = ginibre(3, 3, 0)
    assert clarkson_check(T, np.zeros((3, 3)), 1.5)
    assert clarkson_check(T, T, 1.5)
    for p in (1.0, 2.5):
        with pytest.raises(DomainError):
            clarkson_check(T, T, p)


def test_clarkson_random_direct_evaluation():
    rng = np.random.default_rng(0)
    p = 1.5
    q = p / (p - 1)
    worst = -np.inf
    for _ in range(2000):
        T, S = ginibre(4, 4, rng), ginibre(4, 4, rng)
        lhs = sp(T + S, p) ** q + sp(T - S, p) ** q
        rhs = 2 * (sp(T, p) ** p + sp(S, p) ** p) ** (q / p)
        worst = max(worst, lhs - rhs)
        assert clarkson_check(T, S, p)
    assert worst <= 1e-9


def test_schatten_parallel_examples():
    T = ginibre(3, 3, 1)
    c = 2.0 * np.exp(0.9j)
    ok, lam = schatten_parallel(T, c * T, 1.5)
    assert ok and abs(lam.value - np.exp(-0.9j)) <= 1e-6
    # ||I + lam diag(1,-1)||_2^2 = |1+lam|^2 + |1-lam|^2 = 4
    ok, _ = schatten_parallel(np.eye(2), np.diag([1.0, -1.0]), 2.0)
    assert not ok
    th = np.linspace(0, 2 * np.pi, 721)
    assert max(sp(np.eye(2) + np.exp(1j * t) * np.diag([1.0, -1.0]), 2) for t in th) == pytest.approx(2.0)
    rng = np.random.default_rng(3)
    assert not schatten_parallel(ginibre(3, 3, rng), ginibre(3, 3, rng), 1.5)[0]


def test_trace_norm_is_not_rigid():
    # two PSD matrices are trace-norm parallel without being dependent
    rng = np.random.default_rng(2)
    R1, R2 = random_psd(3, rng), random_psd(3, rng)
    assert schatten_parallel(R1, R2, 1.0)[0]
    assert not linear_dependence_test(R1, R2)
    assert psd_additivity_check(R1, R2)


def test_linear_dependence_examples():
    T = ginibre(3, 3, 4)
    assert linear_dependence_test(T, 3j * T)
    assert not linear_dependence_test(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    n = 4
    rng = np.random.default_rng(5)
    u, v = ginibre(n, 2, rng).T
    top = np.outer(u, np.conj(v))
    assert linear_dependence_test(1.3 * top, 0.7 * top)


def test_jordan_examples():
    tp, tm, rep = jordan_split(np.diag([2.0, -3.0]))
    assert np.allclose(tp.F, np.diag([2.0, 0.0])) and np.allclose(tm.F, np.diag([0.0, 3.0]))
    assert rep["norm"] == pytest.approx(5.0) and rep["satisfied"] and rep["parallel_lambda_minus_one"]
    _, tm, _ = jordan_split(random_psd(3, 0))
    assert np.allclose(tm.F, 0, atol=1e-12)
    with pytest.raises(DomainError):
        jordan_split(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_jordan_random_against_eigen_oracle():
    F = random_hermitian(5, 9)
    w = np.linalg.eigvalsh(F)
    tp, tm, rep = jordan_split(F)
    assert rep["satisfied"]
    assert tp.norm == pytest.approx(w[w > 0].sum(), abs=1e-9)
    assert tm.norm == pytest.approx(-w[w < 0].sum(), abs=1e-9)
    assert np.max(np.abs(tp.F @ tm.F)) <= 1e-9


def test_herm_functional():
    F = HermFunctional(np.diag([1.0, -2.0]))
    assert F(np.eye(2)) == pytest.approx(-1.0) and F.norm == pytest.approx(3.0)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([1.25, 1.5, 2.0]), st.booleans())
def test_rigidity(seed, p, dependent):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    T = ginibre(n, n, rng)
    S = complex(*rng.standard_normal(2)) * T if dependent else ginibre(n, n, rng)
    assert schatten_parallel(T, S, p)[0] == linear_dependence_test(T, S)


def test_operator_parallel_generator_is_not_schatten_parallel():
    T1, T2 = make_parallel_pair(3, 1)
    assert not schatten_parallel(T1, T2, 1.5)[0]
