"""Seeded random matrix generators.

Every generator accepts ``rng`` as an ``int`` seed, a ``numpy.random.Generator``
or ``None`` and is a deterministic function of (seed, shape).
"""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import InputError
from .linalg import adjoint


def check_random_state(rng) -> np.random.Generator:
    if rng is None:
        return np.random.default_rng()
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, numbers.Integral):
        return np.random.default_rng(int(rng))
    if isinstance(rng, (list, tuple)):
        return np.random.default_rng([int(k) for k in rng])
    raise InputError(f"cannot build a random generator from {rng!r}")


def _check_dim(n, name="n"):
    if int(n) != n or n < 1:
        raise InputError(f"{name} must be a positive integer, got {n!r}")
    return int(n)


def ginibre(rows: int, cols: int | None = None, rng=None) -> np.ndarray:
    """Complex Gaussian matrix with independent standard complex entries."""
    rows = _check_dim(rows, "rows")
    cols = rows if cols is None else _check_dim(cols, "cols")
    rng = check_random_state(rng)
    z = rng.standard_normal((rows, cols, 2))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


def random_unit_vector(n: int, rng=None) -> np.ndarray:
    x = ginibre(n, 1, rng)[:, 0]
    return x / np.linalg.norm(x)


def random_unit_vectors(n: int, count: int, rng=None) -> np.ndarray:
    """``count`` unit vectors stored as the columns of an ``(n, count)`` array."""
    X = ginibre(n, count, rng)
    return X / np.linalg.norm(X, axis=0, keepdims=True)


def random_hermitian(n: int, rng=None) -> np.ndarray:
    G = ginibre(n, n, rng)
    return 0.5 * (G + adjoint(G))


def random_psd(n: int, rng=None, rank: int | None = None) -> np.ndarray:
    G = ginibre(n, n if rank is None else rank, rng)
    return G @ adjoint(G)


def random_density(n: int, rng=None) -> np.ndarray:
    """Random density matrix (PSD, unit trace)."""
    P = random_psd(n, rng)
    P = 0.5 * (P + adjoint(P))
    return P / np.trace(P).real


def random_unitary(n: int, rng=None) -> np.ndarray:
    """Unitary from the QR factorization of a Ginibre matrix.

    The phases of ``diag(R)`` are moved into ``Q`` so that the result is
    Haar distributed and independent of the LAPACK sign convention.
    """
    Q, R = np.linalg.qr(ginibre(n, n, rng))
    d = np.diag(R)
    phases = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    return Q * phases


def random_isometry(rows: int, cols: int, rng=None) -> np.ndarray:
    """``rows x cols`` matrix with orthonormal columns (requires rows >= cols)."""
    rows, cols = _check_dim(rows, "rows"), _check_dim(cols, "cols")
    if rows < cols:
        raise InputError(f"isometry needs rows >= cols, got {rows}x{cols}")
    return random_unitary(rows, rng)[:, :cols]


def random_normal(n: int, rng=None, eigenvalues=None) -> np.ndarray:
    """Normal matrix ``U diag(eigenvalues) U^*`` with Haar ``U``."""
    rng = check_random_state(rng)
    if eigenvalues is None:
        eigenvalues = ginibre(n, 1, rng)[:, 0]
    U = random_unitary(n, rng)
    return (U * np.asarray(eigenvalues, dtype=complex)) @ adjoint(U)


def random_nilpotent(n: int, rng=None) -> np.ndarray:
    """Strictly upper triangular Ginibre matrix."""
    return np.triu(ginibre(n, n, rng), k=1)


def _complement(u: np.ndarray) -> np.ndarray:
    """Orthonormal basis (as columns) of the orthogonal complement of unit ``u``."""
    return np.linalg.svd(u[:, None])[0][:, 1:]


def _remainder(u, v, rng, bound):
    # maps v-perp into u-perp, kills v, norm drawn from bound * U(0.1, 1)
    Qu, Qv = _complement(u), _complement(v)
    if Qu.shape[1] == 0 or Qv.shape[1] == 0:
        return np.zeros((u.size, v.size), dtype=complex)
    G = ginibre(Qu.shape[1], Qv.shape[1], rng)
    R = Qu @ (G / np.linalg.norm(G, 2)) @ adjoint(Qv)
    return R * (rng.uniform(0.1, 1.0) * bound)


def aligned_pair(rows: int, cols: int, rng=None, spread: float = 0.5):
    """Two matrices sharing a top singular pair ``(u, v)``.

    Returns ``T1 = s1 u v^* + R1`` and ``T2 = s2 u v^* + R2`` where ``R1`` and
    ``R2`` map ``v``-perp into ``u``-perp, vanish on ``v`` and have operator
    norm at most ``spread * min(s1, s2)``. Hence ``(T1 v | T2 v) = s1 s2 =
    ||T1|| ||T2||``.
    """
    rows, cols = _check_dim(rows, "rows"), _check_dim(cols, "cols")
    rng = check_random_state(rng)
    u = random_unit_vector(rows, rng)
    v = random_unit_vector(cols, rng)
    s1, s2 = rng.uniform(0.5, 2.0, size=2)
    top = np.outer(u, np.conj(v))
    out = [s * top + _remainder(u, v, rng, spread * min(s1, s2)) for s in (s1, s2)]
    return out[0], out[1]


def isometry_parallel_pair(rows: int, cols: int, rng=None, spread: float = 0.5):
    """``x`` with orthonormal columns and ``y`` parallel to it.

    ``y = s (x v) v^* + R`` where ``v`` is a random unit vector, ``R`` maps
    ``v``-perp into ``(x v)``-perp and ``||R|| <= spread * s``; then ``||y|| = s``
    is attained at ``v`` together with ``||x v|| = ||x|| = 1``.
    """
    rows, cols = _check_dim(rows, "rows"), _check_dim(cols, "cols")
    rng = check_random_state(rng)
    x = random_isometry(rows, cols, rng)
    v = random_unit_vector(cols, rng)
    u = x @ v
    s = rng.uniform(0.5, 2.0)
    R = _remainder(u, v, rng, spread * s)
    return x, s * np.outer(u, np.conj(v)) + R


def perturbed_pair(rows: int, cols: int, rng=None, noise: float = 0.05):
    """Aligned pair with ``T2`` perturbed by noise of norm ``noise * ||T2||``."""
    rng = check_random_state(rng)
    T1, T2 = aligned_pair(rows, cols, rng)
    E = ginibre(rows, cols, rng)
    E *= noise * np.linalg.norm(T2, 2) / np.linalg.norm(E, 2)
    return T1, T2 + E
