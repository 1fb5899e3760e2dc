"""The Hilbert C*-module ``M_{n,k}(C)`` over ``M_k(C)``.

Inner product ``<x, y> = x^* y`` (a ``k x k`` matrix), states are density
matrices ``rho`` with ``phi(a) = trace(rho a)``, and the linking algebra
embeds ``x`` as the lower-left block of a ``(k+n) x (k+n)`` matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, InputError, NumericError
from .generators import random_unit_vectors
from .jsonio import matrix_from_dict, matrix_to_dict
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    adjoint,
    check_matrix,
    identity,
    is_hermitian,
    op_norm,
    psd_sqrt,
    spectral_radius,
)
from .minimax import UnimodularScalar, max_over_circle, min_over_plane, sphere_argmax_M
from .parallel import equality_check, is_exact_parallel

__all__ = [
    "ModuleElement",
    "State",
    "LinkingElement",
    "module_inner",
    "module_norm",
    "module_abs",
    "cauchy_schwarz_check",
    "find_parallel_state",
    "module_parallel_suite",
    "linking_embed",
    "ratio_identity_check",
    "state_variance_eps_identity",
    "eps_state_inequality",
    "algebra_parallel_state",
]


@dataclass(frozen=True)
class ModuleElement:
    """Element of ``M_{n,k}(C)``, stored as an ``n x k`` complex matrix."""

    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", check_matrix(self.mat, name="module element"))

    @property
    def n(self) -> int:
        return int(self.mat.shape[0])

    @property
    def k(self) -> int:
        return int(self.mat.shape[1])

    def to_dict(self) -> dict:
        d = matrix_to_dict(self.mat)
        d.update(n=self.n, k=self.k)
        return d

    @classmethod
    def from_dict(cls, d) -> "ModuleElement":
        mat = matrix_from_dict(d)
        for key, size in (("n", mat.shape[0]), ("k", mat.shape[1])):
            if key in d and d[key] != size:
                raise InputError(f"module JSON: '{key}'={d[key]!r} disagrees with the matrix shape")
        return cls(mat)


def _as_element(x) -> ModuleElement:
    return x if isinstance(x, ModuleElement) else ModuleElement(x)


@dataclass(frozen=True)
class State:
    """State ``a -> trace(rho a)`` on ``M_k`` given by a density matrix."""

    rho: np.ndarray

    def __post_init__(self):
        rho = check_matrix(self.rho, name="rho", square=True)
        tol = DEFAULT_TOL.lin_tol
        if not is_hermitian(rho, tol * (1.0 + float(np.max(np.abs(rho))))):
            raise DomainError("state: rho must be Hermitian")
        rho = 0.5 * (rho + adjoint(rho))
        if np.linalg.eigvalsh(rho)[0] < -tol:
            raise DomainError("state: rho must be positive semidefinite")
        if abs(np.trace(rho).real - 1.0) > tol:
            raise DomainError("state: rho must have unit trace")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def vector(cls, v) -> "State":
        """Vector state ``a -> v^* a v`` for a nonzero ``v`` (normalized here)."""
        v = np.asarray(v, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, np.conj(v)))

    @property
    def k(self) -> int:
        return int(self.rho.shape[0])

    def __call__(self, a) -> complex:
        # trace(rho a) without forming the product
        return complex(np.sum(self.rho.T * np.asarray(a, dtype=complex)))

    def to_dict(self) -> dict:
        d = matrix_to_dict(self.rho)
        d["trace"] = float(np.trace(self.rho).real)
        return d

    @classmethod
    def from_dict(cls, d) -> "State":
        st = cls(matrix_from_dict(d))
        if "trace" in d and abs(float(d["trace"]) - 1.0) > DEFAULT_TOL.lin_tol:
            raise InputError("state JSON: 'trace' must be 1")
        return st


@dataclass(frozen=True)
class LinkingElement:
    """Block matrix ``[[a, y^*], [x, t]]`` with ``a`` of size ``k`` and ``t`` of size ``n``."""

    block: np.ndarray
    k: int
    n: int

    def __post_init__(self):
        B = check_matrix(self.block, name="block", square=True)
        if B.shape[0] != self.k + self.n:
            raise InputError(f"linking element: block size {B.shape[0]} != k + n = {self.k + self.n}")
        object.__setattr__(self, "block", B)

    @property
    def a(self):
        return self.block[: self.k, : self.k]

    @property
    def y_adj(self):
        return self.block[: self.k, self.k:]

    @property
    def x(self):
        return self.block[self.k:, : self.k]

    @property
    def t(self):
        return self.block[self.k:, self.k:]

    def to_dict(self) -> dict:
        d = matrix_to_dict(self.block)
        d.update(k=self.k, n=self.n)
        return d


def _pair(x, y):
    x, y = _as_element(x), _as_element(y)
    if x.mat.shape != y.mat.shape:
        raise InputError(f"module elements differ in shape: {x.mat.shape} vs {y.mat.shape}")
    return x, y


def module_inner(x, y) -> np.ndarray:
    """``<x, y> = x^* y``."""
    x, y = _pair(x, y)
    return adjoint(x.mat) @ y.mat


def module_norm(x) -> float:
    """``||x|| = ||<x, x>||^(1/2)``, i.e. the largest singular value of ``x``."""
    return op_norm(_as_element(x).mat)


def module_abs(x, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``|x| = <x, x>^(1/2)``."""
    return psd_sqrt(module_inner(x, x), tol)


def cauchy_schwarz_check(x, y, phi: State | None = None, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Check ``||<x,y>||^2 <= ||<x,x>|| ||<y,y>||`` and, given ``phi``, the state form."""
    x, y = _pair(x, y)
    xy, xx, yy = module_inner(x, y), module_inner(x, x), module_inner(y, y)
    lhs, rhs = op_norm(xy) ** 2, op_norm(xx) * op_norm(yy)
    ok = lhs <= rhs + tol.lin_tol * (1.0 + rhs)
    if phi is not None:
        if phi.k != x.k:
            raise InputError(f"state acts on M_{phi.k}, module algebra is M_{x.k}")
        slhs = abs(phi(xy)) ** 2
        srhs = phi(xx).real * phi(yy).real
        ok = ok and slhs <= srhs + tol.lin_tol * (1.0 + abs(srhs))
    return bool(ok)


def _circle_entry(X, Y, target, tol):
    res = max_over_circle(X, Y, tol)
    entry = equality_check(res.value, target, tol.dec_rel)
    entry["satisfied"] = bool(target - res.value <= tol.dec_rel * target)
    return res, entry


def find_parallel_state(x, y, tol: Tolerances = DEFAULT_TOL, _circle=None):
    """Vector state ``phi`` and ``lam`` with ``phi(<x,y>) = lam ||x|| ||y||``.

    With ``nu`` maximizing ``||x + nu y||`` over the unit circle, ``v`` is a top
    right singular vector of ``x + nu y`` (so a top eigenvector of
    ``<x + nu y, x + nu y>``) and ``phi = v v^*``. ``lam`` is then the phase
    of ``phi(<x,y>)``; in exact arithmetic it equals ``conj(nu)``.

    Returns ``(phi, lam, residual)``.

    Raises
    ------
    DomainError
        If ``x`` and ``y`` are not parallel or one of them is zero.
    NumericError
        If the residual, or ``phi(<x,x>) = ||x||^2``, ``phi(<y,y>) = ||y||^2``,
        miss ``1e-6`` relative accuracy.
    """
    x, y = _pair(x, y)
    nx, ny = module_norm(x), module_norm(y)
    if nx == 0.0 or ny == 0.0:
        raise DomainError("find_parallel_state: x and y must be nonzero")
    res = _circle if _circle is not None else max_over_circle(x.mat, y.mat, tol)
    if nx + ny - res.value > tol.dec_rel * (nx + ny):
        raise DomainError("find_parallel_state: x and y are not parallel")
    v = np.conj(np.linalg.svd(x.mat + res.argument * y.mat)[2][0])
    phi = State.vector(v)
    c = phi(module_inner(x, y))
    lam = UnimodularScalar.from_complex(c)
    residual = abs(c - lam.value * nx * ny)
    scale = nx * ny
    byproducts = [abs(phi(module_inner(x, x)).real - nx**2) / nx**2,
                  abs(phi(module_inner(y, y)).real - ny**2) / ny**2]
    if residual > 1e-6 * scale or max(byproducts) > 1e-6:
        raise NumericError("parallel state misses its defining identities",
                           residual=max(residual / scale, *byproducts))
    return phi, lam, residual


def linking_embed(z) -> LinkingElement:
    """Embed a module element (lower-left block) or a ``k x k`` algebra element (upper-left)."""
    if isinstance(z, ModuleElement):
        n, k = z.n, z.k
        B = np.zeros((k + n, k + n), dtype=complex)
        B[k:, :k] = z.mat
        return LinkingElement(B, k, n)
    a = check_matrix(z, name="a", square=True)
    k = a.shape[0]
    B = np.zeros((k + k, k + k), dtype=complex)
    B[:k, :k] = a
    return LinkingElement(B, k, k)


def linking_isometry_error(x, y=None) -> dict:
    """``| ||embed(x)|| - ||x|| |`` and the deviation of the (1,1) block of ``embed(x)^* embed(y)`` from ``<x,y>``."""
    x = _as_element(x)
    y = x if y is None else _as_element(y)
    ex, ey = linking_embed(x), linking_embed(y)
    prod = adjoint(ex.block) @ ey.block
    return {
        "norm_error": abs(op_norm(ex.block) - module_norm(x)),
        "product_error": float(np.max(np.abs(prod[: x.k, : x.k] - module_inner(x, y)))),
    }


def module_parallel_suite(x, y, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Six characterizations of ``x || y`` and their agreement.

    ``definition``
        ``max_lam ||x + lam y|| = ||x|| + ||y||``.
    ``gram_cross``
        ``<x,x> || <x,y>`` in ``M_k`` and ``||<x,y>|| = ||x|| ||y||``.
    ``spectral``
        ``r(<x,y>) = ||<x,y>|| = ||x|| ||y||``.
    ``left_inner``
        ``max_lam ||<x, x + lam y>|| = ||x|| (||x|| + ||y||)``.
    ``compact_operator``
        some state of ``M_n`` takes the value ``lam ||x|| ||y||`` at ``x y^*``,
        equivalently ``r(x y^*) = ||x|| ||y||``.
    ``linking``
        the definitional test on the linking-algebra images.
    """
    x, y = _pair(x, y)
    nx, ny = module_norm(x), module_norm(y)
    if nx == 0.0 or ny == 0.0:
        raise DomainError("module_parallel_suite: x and y must be nonzero")
    xx, xy = module_inner(x, x), module_inner(x, y)
    prod = nx * ny
    flags = {}

    circle, flags["definition"] = _circle_entry(x.mat, y.mat, nx + ny, tol)

    _, par = _circle_entry(xx, xy, op_norm(xx) + op_norm(xy), tol)
    norm = equality_check(op_norm(xy), prod, tol.dec_rel)
    flags["gram_cross"] = {"parallel": par, "norm": norm,
                           "residual": max(par["residual"], norm["residual"]),
                           "satisfied": par["satisfied"] and norm["satisfied"],
                           "marginal": par["marginal"] or norm["marginal"]}

    r = spectral_radius(xy)
    c1, c2 = equality_check(r, prod, tol.dec_rel), equality_check(op_norm(xy), prod, tol.dec_rel)
    flags["spectral"] = {"spectral_radius": r, "norm": op_norm(xy), "target": prod,
                         "residual": max(c1["residual"], c2["residual"]),
                         "satisfied": c1["satisfied"] and c2["satisfied"],
                         "marginal": c1["marginal"] or c2["marginal"]}

    _, flags["left_inner"] = _circle_entry(xx, xy, nx * (nx + ny), tol)

    theta = x.mat @ adjoint(y.mat)
    rt = spectral_radius(theta)
    flags["compact_operator"] = equality_check(rt, prod, tol.dec_rel)
    flags["compact_operator"]["spectral_radius"] = rt

    link = is_exact_parallel(linking_embed(x).block, linking_embed(y).block, tol)
    flags["linking"] = {"value": link.triangle_value, "target": link.norm_sum,
                        "residual": link.residuals["triangle_gap"], "satisfied": link.verdict,
                        "marginal": link.marginal}

    verdict = flags["definition"]["satisfied"]
    out = {
        "verdict": verdict,
        "characterizations": flags,
        "agree": all(f["satisfied"] == verdict for f in flags.values()),
        "marginal": any(f["marginal"] for f in flags.values()),
        "lambda_circle": circle.unimodular,
        "linking_isometry": linking_isometry_error(x, y),
    }
    if verdict:
        phi, lam, residual = find_parallel_state(x, y, tol, _circle=circle)
        out["state"] = phi
        out["lambda"] = lam
        out["state_residual"] = residual / prod
    return out


def _ratio_sides(phi, x, y):
    nx, ny = module_norm(x), module_norm(y)
    lhs = (ny / nx) * phi(module_inner(x, x)).real + (nx / ny) * phi(module_inner(y, y)).real
    return lhs, phi(module_inner(x, y))


def ratio_identity_check(x, y, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Check ``(||y||/||x||) phi(|x|^2) + (||x||/||y||) phi(|y|^2) = 2 lam phi(<x,y>)``.

    Part (i): if ``x || y``, the state of :func:`find_parallel_state` satisfies
    the identity with ``lam`` the conjugate phase of ``phi(<x,y>)``.

    Part (ii): when ``|x|^2`` or ``|y|^2`` is the identity of ``M_k``, the
    converse is tested: the best vector state among the circle-optimizer
    state and ``sample_budget`` random unit vectors is found; if it
    satisfies the identity, the module suite must report ``x || y``.
    The left side always dominates ``2 |phi(<x,y>)|``, so the identity holds
    exactly when the gap ``lhs - 2 |phi(<x,y>)|`` vanishes.
    """
    x, y = _pair(x, y)
    nx, ny = module_norm(x), module_norm(y)
    if nx == 0.0 or ny == 0.0:
        raise DomainError("ratio_identity_check: x and y must be nonzero")
    scale = 2.0 * nx * ny
    suite = module_parallel_suite(x, y, tol)
    out: dict = {"parallel": suite["verdict"]}

    if suite["verdict"]:
        phi = suite["state"]
        lhs, c = _ratio_sides(phi, x, y)
        lam = UnimodularScalar.from_complex(np.conj(c))
        residual = abs(lhs - 2.0 * lam.value * c) / scale
        out["part_i"] = {"state": phi, "lambda": lam, "lhs": lhs, "rhs": 2.0 * lam.value * c,
                         "residual": residual, "satisfied": bool(residual <= 1e-6)}

    k = x.k
    e = np.eye(k)
    unit = [np.max(np.abs(module_inner(z, z) - e)) <= tol.lin_tol * 10 * k for z in (x, y)]
    if any(unit):
        cands = [np.conj(np.linalg.svd(x.mat + suite["lambda_circle"].value * y.mat)[2][0])]
        X = random_unit_vectors(k, int(tol.sample_budget), tol.rng(49979687))
        xx, yy, xy = module_inner(x, x), module_inner(y, y), module_inner(x, y)
        q = lambda M: np.real(np.sum(np.conj(X) * (M @ X), axis=0))
        gaps = ((ny / nx) * q(xx) + (nx / ny) * q(yy)
                - 2.0 * np.abs(np.sum(np.conj(X) * (xy @ X), axis=0))) / scale
        j = int(np.argmin(gaps))
        best_gap, best_v = float(gaps[j]), X[:, j]
        phi0 = State.vector(cands[0])
        lhs0, c0 = _ratio_sides(phi0, x, y)
        gap0 = (lhs0 - 2.0 * abs(c0)) / scale
        if gap0 <= best_gap:
            best_gap, best_v = gap0, cands[0]
        phi = State.vector(best_v)
        lhs, c = _ratio_sides(phi, x, y)
        lam = UnimodularScalar.from_complex(np.conj(c) if c != 0 else 1.0)
        holds = bool(abs(lhs - 2.0 * lam.value * c) / scale <= 1e-6)
        out["part_ii"] = {
            "hypothesis": "x" if unit[0] else "y",
            "state": phi,
            "lambda": lam,
            "identity_residual": abs(lhs - 2.0 * lam.value * c) / scale,
            "identity_holds": holds,
            "converse_consistent": bool(suite["verdict"] or not holds),
        }
    return out


def state_variance_eps_identity(a, eps: float, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Compare the vector-state variance bound with ``inf_mu ||a + mu I||``.

    ``V_vec = sup_v sqrt(||a v||^2 - |(a v | v)|^2)`` over unit ``v`` (sampled
    sphere ascent) and ``D = min_mu ||a + mu I||``; the two must agree to
    ``1e-5``. Random mixed states give a lower-bound cross-check
    ``sqrt(phi(a^* a) - |phi(a)|^2) <= D``. The verdict ``a ||^eps I`` is
    reported from both routes.
    """
    if not (0.0 <= eps < 1.0):
        raise DomainError(f"eps must lie in [0, 1), got {eps!r}")
    a = check_matrix(a, name="a", square=True)
    k = a.shape[0]
    I = identity(k)
    M, v = sphere_argmax_M(a, I, tol)
    V = math.sqrt(max(M, 0.0))
    plane = min_over_plane(a, I, tol)
    D = plane.value
    na = op_norm(a)

    rng = tol.rng(86028121)
    count = max(8, int(tol.sample_budget) // 8)
    G = rng.standard_normal((count, k, k, 2)) @ np.array([1.0, 1j])
    R = G @ np.conj(np.transpose(G, (0, 2, 1)))
    R /= np.trace(R, axis1=1, axis2=2).real[:, None, None]
    aa = adjoint(a) @ a
    mixed = np.real(np.einsum("sij,ji->s", R, aa)) - np.abs(np.einsum("sij,ji->s", R, a)) ** 2
    mixed_sup = float(np.sqrt(max(float(mixed.max()), 0.0)))

    gap = abs(V - D)
    slack = tol.opt_tol * (1.0 + na)
    by_D = bool(D <= eps * na + slack)
    by_V = bool(V <= eps * na + slack)
    if gap > 1e-5:
        raise NumericError("vector-state variance and distance to scalars disagree", residual=gap)
    return {
        "V_vec": V,
        "D": D,
        "mu_star": plane.argument,
        "gap": gap,
        "mixed_state_sup": mixed_sup,
        "mixed_consistent": bool(mixed_sup <= D + slack),
        "verdict": by_D,
        "verdict_variance": by_V,
        "agree": by_D == by_V,
        "witness_v": v,
    }


def _grid_vector_states(k: int) -> np.ndarray:
    vecs = [np.eye(k, dtype=complex)]
    for i in range(k):
        for j in range(i + 1, k):
            for w in (1.0, -1.0, 1j, -1j):
                v = np.zeros(k, dtype=complex)
                v[i], v[j] = 1.0, w
                vecs.append((v / math.sqrt(2.0))[:, None])
    return np.concatenate(vecs, axis=1)


def eps_state_inequality(x, y, eps: float, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Sample ``|phi(<x,y>)|^2 >= phi(<x,x>) phi(<y,y>) - eps^2 ||<x,x>|| ||<y,y>||``.

    States: ``sample_budget`` normalized random PSD matrices and the vector
    states of the basis vectors and their pairwise combinations
    ``(e_i + w e_j)/sqrt 2``, ``w in {1, -1, i, -i}``. True iff no sample
    violates the inequality beyond ``lin_tol``. Necessary condition for
    ``x ||^eps y`` only.
    """
    if not (0.0 <= eps < 1.0):
        raise DomainError(f"eps must lie in [0, 1), got {eps!r}")
    x, y = _pair(x, y)
    k = x.k
    xx, yy, xy = module_inner(x, x), module_inner(y, y), module_inner(x, y)
    rng = tol.rng(67867967)
    G = rng.standard_normal((int(tol.sample_budget), k, k, 2)) @ np.array([1.0, 1j])
    R = G @ np.conj(np.transpose(G, (0, 2, 1)))
    R /= np.trace(R, axis1=1, axis2=2).real[:, None, None]
    V = _grid_vector_states(k)
    Rv = np.einsum("is,js->sij", V, np.conj(V))
    R = np.concatenate([R, Rv])

    def ev(M):
        return np.einsum("sij,ji->s", R, M)

    lhs = np.abs(ev(xy)) ** 2
    bound = eps**2 * op_norm(xx) * op_norm(yy)
    rhs = np.real(ev(xx)) * np.real(ev(yy)) - bound
    return bool(np.all(lhs >= rhs - tol.lin_tol * (1.0 + op_norm(xx) * op_norm(yy))))


def algebra_parallel_state(a, b, tol: Tolerances = DEFAULT_TOL):
    """State ``phi`` on ``M_k`` and ``lam`` with ``phi(a^* b) = lam ||a|| ||b||``.

    The square case of :func:`find_parallel_state`. The vector state
    ``v v^*`` also certifies ``||a v|| = ||a||`` and ``(b v | a v) = lam ||a|| ||b||``
    in the identity representation; these are returned in a report.

    Returns ``(phi, lam, residual, report)``.
    """
    a = check_matrix(a, name="a", square=True)
    b = check_matrix(b, name="b", square=True)
    if a.shape != b.shape:
        raise InputError(f"shape mismatch: a {a.shape}, b {b.shape}")
    phi, lam, residual = find_parallel_state(ModuleElement(a), ModuleElement(b), tol)
    w, V = np.linalg.eigh(phi.rho)
    v = V[:, -1]
    na, nb = op_norm(a), op_norm(b)
    report = {
        "norm_a_v": float(np.linalg.norm(a @ v)),
        "norm_b_v": float(np.linalg.norm(b @ v)),
        "norm_a": na,
        "norm_b": nb,
        "representation_value": complex(np.vdot(a @ v, b @ v)),
        "representation_residual": abs(np.vdot(a @ v, b @ v) - lam.value * na * nb) / (na * nb),
    }
    return phi, lam, residual, report
