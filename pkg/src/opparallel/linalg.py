"""Dense complex matrix helpers: validation, norms, spectra, square roots.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; the
``check_*`` helpers play the role of scikit-learn's ``check_array`` and are
the single entry point for user supplied data.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .exceptions import DomainError, InputError, NumericError

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "check_matrix",
    "check_vector",
    "check_same_shape",
    "adjoint",
    "identity",
    "rank_one",
    "inner",
    "op_norm",
    "op_norms",
    "schatten_norm",
    "schatten_norms",
    "max_singular_triplet",
    "hessenberg",
    "eigvals_qr",
    "eigvecs",
    "spectral_radius",
    "psd_sqrt",
    "is_hermitian",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Tolerances:
    """Decision and convergence tolerances threaded through every predicate.

    Parameters
    ----------
    lin_tol : float
        Absolute tolerance for algebraic identities.
    opt_tol : float
        Convergence tolerance on optimizer objective values.
    dec_rel : float
        Relative margin used for boolean verdicts on equalities.
    sample_budget : int
        Number of random samples used by sampled suprema.
    seed : int
        Seed for every sampled estimator.
    """

    lin_tol: float = 1e-9
    opt_tol: float = 1e-7
    dec_rel: float = 1e-6
    sample_budget: int = 2048
    seed: int = 0

    def __post_init__(self):
        for name in ("lin_tol", "opt_tol", "dec_rel"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InputError(f"{name} must be a positive finite number, got {value!r}")
        if self.dec_rel >= 1:
            raise InputError(f"dec_rel must be < 1, got {self.dec_rel!r}")
        if int(self.sample_budget) != self.sample_budget or self.sample_budget < 1:
            raise InputError(f"sample_budget must be a positive integer, got {self.sample_budget!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise InputError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    def rng(self, *keys: int) -> np.random.Generator:
        """Generator derived from ``seed`` and optional integer stream keys."""
        return np.random.default_rng([int(self.seed), *map(int, keys)])

    def with_(self, **changes) -> "Tolerances":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "lin_tol": self.lin_tol,
            "opt_tol": self.opt_tol,
            "dec_rel": self.dec_rel,
            "sample_budget": int(self.sample_budget),
            "seed": int(self.seed),
        }


DEFAULT_TOL = Tolerances()


def check_matrix(A, *, name: str = "A", square: bool = False) -> np.ndarray:
    """Validate and convert ``A`` to a finite, non-empty complex 2-D array."""
    try:
        arr = np.asarray(A, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name}: cannot convert to a complex matrix ({exc})") from exc
    if arr.ndim != 2:
        raise InputError(f"{name}: expected a 2-D matrix, got ndim={arr.ndim}")
    if arr.size == 0:
        raise InputError(f"{name}: matrix is empty")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name}: matrix has non-finite entries")
    if square and arr.shape[0] != arr.shape[1]:
        raise InputError(f"{name}: expected a square matrix, got shape {arr.shape}")
    return arr


def check_vector(x, *, name: str = "x") -> np.ndarray:
    try:
        arr = np.asarray(x, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name}: cannot convert to a complex vector ({exc})") from exc
    if arr.ndim != 1 or arr.size == 0:
        raise InputError(f"{name}: expected a non-empty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name}: vector has non-finite entries")
    return arr


def check_same_shape(A, B, *, square: bool = False, names=("T1", "T2")):
    A = check_matrix(A, name=names[0], square=square)
    B = check_matrix(B, name=names[1], square=square)
    if A.shape != B.shape:
        raise InputError(f"shape mismatch: {names[0]} is {A.shape}, {names[1]} is {B.shape}")
    return A, B


def adjoint(A) -> np.ndarray:
    return np.conj(np.swapaxes(A, -1, -2))


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def rank_one(xi, eta) -> np.ndarray:
    """The operator ``zeta -> (zeta | eta) xi``, i.e. ``xi @ eta^H``."""
    xi = check_vector(xi, name="xi")
    eta = check_vector(eta, name="eta")
    return np.outer(xi, np.conj(eta))


def inner(x, y) -> complex:
    """Hilbert space inner product ``(x | y)``, linear in the first slot."""
    return complex(np.vdot(y, x))


def op_norm(A) -> float:
    """Largest singular value of ``A``."""
    A = check_matrix(A)
    return float(np.linalg.svd(A, compute_uv=False)[0])


def op_norms(stack: np.ndarray) -> np.ndarray:
    """Operator norms of a stack of matrices with shape ``(..., m, n)``."""
    return np.linalg.svd(stack, compute_uv=False)[..., 0]


def schatten_norms(stack: np.ndarray, p: float) -> np.ndarray:
    s = np.linalg.svd(stack, compute_uv=False)
    if p == 2:
        return np.sqrt(np.sum(s * s, axis=-1))
    if p == 1:
        return np.sum(s, axis=-1)
    top = s[..., :1]
    safe = np.where(top > 0, top, 1.0)
    # scale by the top singular value to avoid overflow in s**p
    return safe[..., 0] * np.sum((s / safe) ** p, axis=-1) ** (1.0 / p)


def schatten_norm(A, p: float) -> float:
    """Schatten p-norm ``(sum_i sigma_i^p)^(1/p)`` for ``1 <= p < inf``."""
    A = check_matrix(A)
    if not (np.isfinite(p) and p >= 1):
        raise DomainError(f"Schatten exponent must satisfy 1 <= p < inf, got {p!r}")
    return float(schatten_norms(A, p))


def max_singular_triplet(A):
    """Return ``(sigma, u, v)`` with ``A v = sigma u`` and unit ``u``, ``v``.

    Raises
    ------
    DomainError
        If ``A`` is the zero matrix.
    """
    A = check_matrix(A)
    u, s, vh = np.linalg.svd(A)
    if s[0] == 0:
        raise DomainError("max_singular_triplet: zero matrix has no singular triplet")
    return float(s[0]), u[:, 0].copy(), np.conj(vh[0]).copy()


def hessenberg(A) -> np.ndarray:
    """Unitarily similar upper Hessenberg form via Householder reflections."""
    H = check_matrix(A, square=True).copy()
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0 or np.linalg.norm(x[1:]) == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        H[k + 1:, :] -= 2.0 * np.outer(v, np.conj(v) @ H[k + 1:, :])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, np.conj(v))
        H[k + 2:, k] = 0.0
    return H


def _wilkinson_shift(a, b, c, d):
    # eigenvalue of [[a, b], [c, d]] closest to d
    half = 0.5 * (a - d)
    disc = np.sqrt(half * half + b * c)
    mu1 = d - b * c / (half + disc) if half + disc != 0 else d
    mu2 = d - b * c / (half - disc) if half - disc != 0 else d
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def eigvals_qr(A, max_sweeps: int | None = None) -> np.ndarray:
    """Eigenvalues by Hessenberg reduction and Wilkinson-shifted QR sweeps.

    Each sweep is one implicit single-shift QR step (Givens rotations) on the
    active unreduced block. At most ``30 * n`` sweeps are spent overall.

    Raises
    ------
    NumericError
        If the iteration does not deflate within the sweep budget; the
        exception carries the size of the last non-negligible subdiagonal.
    """
    H = hessenberg(A)
    n = H.shape[0]
    if max_sweeps is None:
        max_sweeps = 30 * n
    scale = np.linalg.norm(H)
    eigs = np.empty(n, dtype=complex)
    hi = n - 1
    sweeps = 0
    since_deflation = 0
    while hi >= 0:
        lo = hi
        while lo > 0:
            s = abs(H[lo - 1, lo - 1]) + abs(H[lo, lo])
            if s == 0.0:
                s = scale
            if abs(H[lo, lo - 1]) <= _EPS * s:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eigs[hi] = H[hi, hi]
            hi -= 1
            since_deflation = 0
            continue
        if sweeps >= max_sweeps:
            raise NumericError(
                f"QR iteration did not converge in {max_sweeps} sweeps",
                residual=abs(H[hi, hi - 1]),
            )
        if since_deflation and since_deflation % 10 == 0:
            # exceptional shift breaks symmetric stagnation cycles
            mu = H[hi, hi] + 0.75 * abs(H[hi, hi - 1])
        else:
            mu = _wilkinson_shift(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
        B = H[lo:hi + 1, lo:hi + 1]
        m = B.shape[0]
        diag = np.arange(m)
        B[diag, diag] -= mu
        rotations = []
        for k in range(m - 1):
            x, y = B[k, k], B[k + 1, k]
            r = np.hypot(abs(x), abs(y))
            if r == 0.0:
                G = np.eye(2, dtype=complex)
            else:
                c, s = x / r, y / r
                G = np.array([[np.conj(c), np.conj(s)], [-s, c]])
            B[k:k + 2, k:] = G @ B[k:k + 2, k:]
            rotations.append(G)
        for k, G in enumerate(rotations):
            B[:k + 2, k:k + 2] = B[:k + 2, k:k + 2] @ np.conj(G.T)
        B[diag, diag] += mu
        sweeps += 1
        since_deflation += 1
    return eigs


def spectral_radius(A) -> float:
    """Maximum modulus over the eigenvalues of the square matrix ``A``."""
    return float(np.max(np.abs(eigvals_qr(A))))


def eigvecs(A, eigenvalues=None):
    """Unit eigenvectors for the given (or all) eigenvalues of ``A``.

    Each vector is the right singular vector of ``A - lambda I`` belonging to
    its smallest singular value, which is robust for clustered spectra.
    """
    A = check_matrix(A, square=True)
    if eigenvalues is None:
        eigenvalues = eigvals_qr(A)
    n = A.shape[0]
    out = []
    for lam in np.atleast_1d(eigenvalues):
        _, _, vh = np.linalg.svd(A - lam * np.eye(n))
        out.append(np.conj(vh[-1]))
    return np.array(out).T if out else np.zeros((n, 0), dtype=complex)


def is_hermitian(A, atol: float) -> bool:
    A = np.asarray(A)
    return A.shape[0] == A.shape[1] and float(np.max(np.abs(A - adjoint(A)))) <= atol


def psd_sqrt(A, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Positive square root of a Hermitian positive semidefinite matrix.

    Eigenvalues in ``[-lin_tol, 0)`` are treated as roundoff and clamped to 0.

    Raises
    ------
    DomainError
        If ``A`` is not Hermitian within ``lin_tol`` or has an eigenvalue
        below ``-lin_tol``.
    """
    A = check_matrix(A, square=True)
    scale = 1.0 + float(np.max(np.abs(A)))
    if not is_hermitian(A, tol.lin_tol * scale):
        raise DomainError("psd_sqrt: matrix is not Hermitian")
    w, V = np.linalg.eigh(0.5 * (A + adjoint(A)))
    if w[0] < -tol.lin_tol:
        raise DomainError(f"psd_sqrt: matrix has negative eigenvalue {w[0]:.3e}")
    root = np.sqrt(np.clip(w, 0.0, None))
    B = (V * root) @ adjoint(V)
    return 0.5 * (B + adjoint(B))
