"""Parallelism in Schatten p-norms, the Clarkson inequality and trace-norm functionals.

For ``1 < p <= 2`` the Schatten norm is uniformly convex, so parallel
matrices are linearly dependent; for ``p = 1`` this rigidity fails (any two
PSD matrices are parallel in trace norm).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, InputError
from .linalg import DEFAULT_TOL, Tolerances, check_matrix, check_same_shape, is_hermitian, schatten_norm, schatten_norms
from .minimax import UnimodularScalar, circle_maximize

__all__ = [
    "PExponent",
    "HermFunctional",
    "clarkson_check",
    "schatten_parallel",
    "linear_dependence_test",
    "jordan_split",
    "psd_additivity_check",
]


@dataclass(frozen=True)
class PExponent:
    """Schatten exponent ``p >= 1`` with its conjugate ``q`` (``None`` for ``p = 1``)."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if not math.isfinite(p) or p < 1.0:
            raise DomainError(f"Schatten exponent must satisfy 1 <= p < inf, got {self.p!r}")
        object.__setattr__(self, "p", p)

    @property
    def q(self) -> float | None:
        return None if self.p == 1.0 else self.p / (self.p - 1.0)

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q}


@dataclass(frozen=True)
class HermFunctional:
    """The functional ``A -> trace(F A)`` for Hermitian ``F``; its norm is ``||F||_1``."""

    F: np.ndarray

    def __post_init__(self):
        F = check_matrix(self.F, name="F", square=True)
        if not is_hermitian(F, DEFAULT_TOL.lin_tol * (1.0 + float(np.max(np.abs(F))))):
            raise DomainError("functional matrix must be Hermitian")
        object.__setattr__(self, "F", 0.5 * (F + F.conj().T))

    def __call__(self, A) -> complex:
        return complex(np.trace(self.F @ np.asarray(A, dtype=complex)))

    @property
    def norm(self) -> float:
        return schatten_norm(self.F, 1.0)

    def to_dict(self) -> dict:
        return {"F": self.F, "norm": self.norm}


def _as_exponent(pe) -> PExponent:
    return pe if isinstance(pe, PExponent) else PExponent(pe)


def clarkson_check(T, S, pe, tol: Tolerances = DEFAULT_TOL) -> bool:
    """``||T+S||_p^q + ||T-S||_p^q <= 2 (||T||_p^p + ||S||_p^p)^(q/p)`` up to ``lin_tol``.

    Raises
    ------
    DomainError
        If ``p`` is outside ``(1, 2]``.
    """
    pe = _as_exponent(pe)
    if not (1.0 < pe.p <= 2.0):
        raise DomainError(f"Clarkson inequality needs 1 < p <= 2, got p={pe.p}")
    A, B = check_same_shape(T, S, names=("T", "S"))
    p, q = pe.p, pe.q
    nplus, nminus, nT, nS = schatten_norms(np.stack([A + B, A - B, A, B]), p)
    lhs = nplus**q + nminus**q
    rhs = 2.0 * (nT**p + nS**p) ** (q / p)
    return bool(lhs <= rhs + tol.lin_tol * (1.0 + rhs))


def schatten_parallel(T, S, pe, tol: Tolerances = DEFAULT_TOL):
    """Decide ``max_{|lam|=1} ||T + lam S||_p = ||T||_p + ||S||_p`` within ``dec_rel``.

    Uses the certified circle maximizer with curvature constant ``||S||_p``.
    Returns ``(verdict, lam)``.

    Examples
    --------
    >>> import numpy as np
    >>> ok, lam = schatten_parallel(np.eye(2), 2j * np.eye(2), 1.5)
    >>> ok, np.round(lam.value, 8)
    (True, np.complex128(-1j))
    """
    pe = _as_exponent(pe)
    A, B = check_same_shape(T, S, names=("T", "S"))
    nT, nS = schatten_norms(np.stack([A, B]), pe.p)
    total = nT + nS
    if total == 0.0:
        return True, UnimodularScalar(0.0)

    def objective(thetas):
        z = np.exp(1j * np.asarray(thetas, dtype=float))[:, None, None]
        return schatten_norms(A[None] + z * B[None], pe.p)

    res = circle_maximize(objective, nS, total, tol)
    return bool(total - res.value <= tol.dec_rel * total), res.unimodular


def linear_dependence_test(T, S, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff the Gram matrix of ``vec(T), vec(S)`` is numerically singular."""
    A, B = check_same_shape(T, S, names=("T", "S"))
    V = np.stack([A.ravel(), B.ravel()], axis=1)
    w = np.linalg.eigvalsh(V.conj().T @ V)
    return bool(w[0] <= tol.lin_tol * (w[-1] + 1.0))


def jordan_split(F, tol: Tolerances = DEFAULT_TOL):
    """Split a Hermitian functional into positive and negative parts.

    Returns ``(tau_plus, tau_minus, report)`` with ``F = tau_plus - tau_minus``,
    both parts PSD, ``tau_plus tau_minus = 0`` and ``||F||_1 = ||tau_plus||_1
    + ||tau_minus||_1``. The report records the additivity residual, the
    orthogonality residual and whether the parts are trace-norm parallel
    with ``lam = -1``.
    """
    if not isinstance(F, HermFunctional):
        F = HermFunctional(F)
    w, V = np.linalg.eigh(F.F)
    plus = (V * np.clip(w, 0.0, None)) @ V.conj().T
    minus = (V * np.clip(-w, 0.0, None)) @ V.conj().T
    tp, tm = HermFunctional(plus), HermFunctional(minus)
    scale = 1.0 + F.norm
    additivity = abs(F.norm - (tp.norm + tm.norm))
    orth = float(np.max(np.abs(plus @ minus))) if plus.size else 0.0
    # plus - minus = plus + (-1) minus reaches the triangle bound
    lam_minus = abs(schatten_norm(plus - minus, 1.0) - (tp.norm + tm.norm))
    report = {
        "norm": F.norm,
        "norm_plus": tp.norm,
        "norm_minus": tm.norm,
        "additivity_residual": additivity,
        "orthogonality_residual": orth,
        "parallel_lambda_minus_one": bool(lam_minus <= tol.lin_tol * scale),
        "satisfied": bool(additivity <= tol.lin_tol * scale and orth <= tol.lin_tol * scale),
    }
    return tp, tm, report


def psd_additivity_check(R1, R2, tol: Tolerances = DEFAULT_TOL) -> bool:
    """For PSD ``R1, R2``: ``||R1 + R2||_1 = ||R1||_1 + ||R2||_1`` within ``lin_tol``."""
    A, B = check_same_shape(R1, R2, square=True, names=("R1", "R2"))
    for name, M in (("R1", A), ("R2", B)):
        if not is_hermitian(M, tol.lin_tol * (1.0 + float(np.max(np.abs(M))))):
            raise InputError(f"{name} must be Hermitian")
        if np.linalg.eigvalsh(M)[0] < -tol.lin_tol * (1.0 + float(np.max(np.abs(M)))):
            raise DomainError(f"{name} must be positive semidefinite")
    s, a, b = schatten_norms(np.stack([A + B, A, B]), 1.0)
    return bool(abs(s - (a + b)) <= tol.lin_tol * (1.0 + a + b))
