"""Exact and approximate parallelism of operators on C^n.

``T1 || T2`` (exact parallelism) means ``||T1 + lam T2|| = ||T1|| + ||T2||`` for
some unimodular ``lam``; ``T1 ||^eps T2`` means ``inf_mu ||T1 + mu T2|| <=
eps ||T1||``. Each equivalent characterization is computed along its own
route so that the routes can be cross-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, InputError, NumericError
from .generators import aligned_pair, check_random_state, ginibre, random_unit_vectors
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    adjoint,
    check_matrix,
    check_same_shape,
    check_vector,
    eigvals_qr,
    eigvecs,
    identity,
    inner,
    is_hermitian,
    op_norm,
    op_norms,
    spectral_radius,
)
from .minimax import (
    OptResult,
    UnimodularScalar,
    _M_value_grad,
    max_over_circle,
    min_over_plane,
    sphere_argmax_M,
    sphere_ascent,
    sphere_starts,
)

__all__ = [
    "ParallelReport",
    "equality_check",
    "is_exact_parallel",
    "spectral_criterion",
    "witness_vector",
    "characterization_suite",
    "is_eps_parallel",
    "bs_orthogonal_sup",
    "eps_pointwise_bound_check",
    "vector_eps_parallel",
    "identity_parallel_suite",
    "derivation_norm",
    "unitary_orbit_check",
    "elementary_operator_bounds",
    "make_parallel_pair",
]


def equality_check(value: float, target: float, rel: float) -> dict:
    """Compare ``value`` against ``target`` with relative margin ``rel``.

    ``marginal`` is set when the relative gap lies within a factor 10 of the
    margin on either side, i.e. the verdict is close to the threshold.
    """
    denom = max(abs(target), np.finfo(float).tiny)
    residual = abs(value - target) / denom if target != 0 else abs(value)
    return {
        "value": float(value),
        "target": float(target),
        "residual": float(residual),
        "satisfied": bool(residual <= rel),
        "marginal": bool(rel / 10.0 < residual <= 10.0 * rel),
    }


@dataclass
class ParallelReport:
    """Verdict of a parallelism test together with its witnesses."""

    verdict: bool
    triangle_value: float
    norm_sum: float
    lambda_star: UnimodularScalar | None = None
    mu_star: complex | None = None
    characterizations: dict = field(default_factory=dict)
    witness_xi: np.ndarray | None = None
    residuals: dict = field(default_factory=dict)
    marginal: bool = False
    degenerate: bool = False

    @property
    def agree(self) -> bool:
        """True when every recorded characterization matches the verdict."""
        return all(c["satisfied"] == self.verdict for c in self.characterizations.values())

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "triangle_value": self.triangle_value,
            "norm_sum": self.norm_sum,
            "lambda_star": self.lambda_star,
            "mu_star": self.mu_star,
            "characterizations": self.characterizations,
            "witness_xi": self.witness_xi,
            "residuals": self.residuals,
            "marginal": self.marginal or any(c.get("marginal") for c in self.characterizations.values()),
            "degenerate": self.degenerate,
            "agree": self.agree,
        }


def _triangle(T1, T2, tol):
    A, B = check_same_shape(T1, T2)
    nA, nB = op_norm(A), op_norm(B)
    total = nA + nB
    if total == 0.0:
        return A, B, nA, nB, OptResult(1.0 + 0j, 0.0, 0, 0.0, degenerate=True)
    return A, B, nA, nB, max_over_circle(A, B, tol)


def _is_parallel_value(circle_value, total, tol):
    gap = total - circle_value
    margin = tol.dec_rel * total
    verdict = gap <= margin
    marginal = margin / 10.0 < gap <= 10.0 * margin if total > 0 else False
    return verdict, marginal, gap


def is_exact_parallel(T1, T2, tol: Tolerances = DEFAULT_TOL) -> ParallelReport:
    """Decide ``T1 || T2`` from the triangle equality.

    The verdict is true iff ``||T1|| + ||T2|| - max_lam ||T1 + lam T2||`` is
    at most ``dec_rel`` times ``||T1|| + ||T2||``.

    Examples
    --------
    >>> import numpy as np
    >>> is_exact_parallel(np.diag([1.0, 0.0]), np.eye(2)).verdict
    True
    >>> is_exact_parallel(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])).verdict
    False
    """
    A, B, nA, nB, res = _triangle(T1, T2, tol)
    if A.shape[0] != A.shape[1]:
        raise InputError(f"expected square operators, got shape {A.shape}")
    total = nA + nB
    verdict, marginal, gap = _is_parallel_value(res.value, total, tol)
    report = ParallelReport(
        verdict=bool(verdict),
        triangle_value=res.value,
        norm_sum=total,
        lambda_star=res.unimodular,
        marginal=bool(marginal),
        degenerate=bool(nA == 0.0 or nB == 0.0),
    )
    report.residuals["triangle_gap"] = gap / total if total else 0.0
    report.residuals["certified_gap"] = res.certified_gap
    return report


def _spectral_triplet(P, nA, nB, tol):
    r = spectral_radius(P)
    nP = op_norm(P)
    target = nA * nB
    c1 = equality_check(r, target, tol.dec_rel)
    c2 = equality_check(nP, target, tol.dec_rel)
    return r, nP, target, c1, c2


def spectral_criterion(T1, T2, tol: Tolerances = DEFAULT_TOL):
    """Test ``r(T2^* T1) = ||T2^* T1|| = ||T1|| ||T2||``.

    Returns ``(satisfied, r(T2^* T1), ||T2^* T1||, ||T1|| ||T2||)``. The same
    test run on ``T1 T2^*`` must give the same flag; a mismatch (outside
    marginal cases) is reported as a :class:`NumericError`.
    """
    A, B = check_same_shape(T1, T2, square=True)
    nA, nB = op_norm(A), op_norm(B)
    r, nP, target, c1, c2 = _spectral_triplet(adjoint(B) @ A, nA, nB, tol)
    ok = c1["satisfied"] and c2["satisfied"]
    _, _, _, d1, d2 = _spectral_triplet(A @ adjoint(B), nA, nB, tol)
    ok_alt = d1["satisfied"] and d2["satisfied"]
    if ok != ok_alt and not any(c["marginal"] for c in (c1, c2, d1, d2)):
        raise NumericError("inner and outer spectral criteria disagree",
                           residual=abs(c1["residual"] - d1["residual"]))
    return bool(ok), r, nP, target


def spectral_criteria(T1, T2, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Both spectral tests as report entries (``T2^* T1`` and ``T1 T2^*``)."""
    A, B = check_same_shape(T1, T2, square=True)
    nA, nB = op_norm(A), op_norm(B)
    out = {}
    for name, P in (("spectral_inner", adjoint(B) @ A), ("spectral_outer", A @ adjoint(B))):
        r, nP, target, c1, c2 = _spectral_triplet(P, nA, nB, tol)
        out[name] = {
            "spectral_radius": r,
            "norm": nP,
            "target": target,
            "residual": max(c1["residual"], c2["residual"]),
            "satisfied": c1["satisfied"] and c2["satisfied"],
            "marginal": c1["marginal"] or c2["marginal"],
        }
    return out


def witness_vector(T1, T2, tol: Tolerances = DEFAULT_TOL, report: ParallelReport | None = None):
    """Unit ``xi`` and unimodular ``lam`` with ``(T1 xi | T2 xi) = lam ||T1|| ||T2||``.

    ``xi`` is the top right singular vector of ``T1 + lam* T2`` where ``lam*``
    realizes the triangle equality; ``lam`` is then the phase of
    ``(T1 xi | T2 xi)``. Returns ``(xi, lam, residual)`` with the residual
    ``|(T1 xi | T2 xi) - lam ||T1|| ||T2|||``.

    Raises
    ------
    DomainError
        If the pair is not parallel or one operand is zero.
    """
    A, B = check_same_shape(T1, T2, square=True)
    if report is None:
        report = is_exact_parallel(A, B, tol)
    if not report.verdict:
        raise DomainError("witness_vector: operators are not parallel")
    nA, nB = op_norm(A), op_norm(B)
    if nA == 0.0 or nB == 0.0:
        raise DomainError("witness_vector: both operators must be nonzero")
    S = A + report.lambda_star.value * B
    xi = np.conj(np.linalg.svd(S)[2][0])
    c = inner(A @ xi, B @ xi)
    lam = UnimodularScalar.from_complex(c)
    return xi, lam, abs(c - lam.value * nA * nB)


def _parallel_entry(X, Y, tol):
    rep = is_exact_parallel(X, Y, tol)
    return rep, {
        "value": rep.triangle_value,
        "target": rep.norm_sum,
        "residual": rep.residuals["triangle_gap"],
        "satisfied": rep.verdict,
        "marginal": rep.marginal,
    }


def _cross_entry(G, C, cross_target, tol):
    # G || C together with ||C|| = cross_target
    rep, par = _parallel_entry(G, C, tol)
    norm = equality_check(op_norm(C), cross_target, tol.dec_rel)
    return {
        "parallel": par,
        "norm": norm,
        "residual": max(par["residual"], norm["residual"]),
        "satisfied": par["satisfied"] and norm["satisfied"],
        "marginal": par["marginal"] or norm["marginal"],
    }


def characterization_suite(T1, T2, tol: Tolerances = DEFAULT_TOL) -> ParallelReport:
    """Evaluate every equivalent form of ``T1 || T2`` along independent routes.

    Recorded characterizations:

    ``triangle``
        ``||T1 + lam T2|| = ||T1|| + ||T2||`` (the definition; sets the verdict).
    ``left_product``
        ``||T1^* (T1 + lam T2)|| = ||T1|| (||T1|| + ||T2||)`` at the optimal ``lam``.
    ``gram_cross_12``, ``gram_cross_21``
        ``Ti^* Ti || Tj^* Ti`` and ``||Tj^* Ti|| = ||Ti|| ||Tj||``.
    ``outer_cross_12``, ``outer_cross_21``
        ``Ti Ti^* || Ti Tj^*`` and ``||Ti Tj^*|| = ||Ti|| ||Tj||``.
    ``spectral_inner``, ``spectral_outer``
        ``r(T2^* T1)`` resp. ``r(T1 T2^*)`` equal to the norm and to ``||T1|| ||T2||``.
    """
    A, B = check_same_shape(T1, T2, square=True)
    nA, nB = op_norm(A), op_norm(B)
    if nA == 0.0 or nB == 0.0:
        raise DomainError("characterization_suite: both operators must be nonzero")
    base = is_exact_parallel(A, B, tol)
    lam = base.lambda_star.value
    chars = {
        "triangle": {
            "value": base.triangle_value,
            "target": base.norm_sum,
            "residual": base.residuals["triangle_gap"],
            "satisfied": base.verdict,
            "marginal": base.marginal,
        }
    }
    chars["left_product"] = equality_check(op_norm(adjoint(A) @ (A + lam * B)), nA * (nA + nB), tol.dec_rel)
    ops = {1: A, 2: B}
    for i, j in ((1, 2), (2, 1)):
        Ti, Tj = ops[i], ops[j]
        chars[f"gram_cross_{i}{j}"] = _cross_entry(adjoint(Ti) @ Ti, adjoint(Tj) @ Ti, nA * nB, tol)
        chars[f"outer_cross_{i}{j}"] = _cross_entry(Ti @ adjoint(Ti), Ti @ adjoint(Tj), nA * nB, tol)
    chars.update(spectral_criteria(A, B, tol))
    base.characterizations = chars
    if base.verdict:
        xi, lam_w, res = witness_vector(A, B, tol, report=base)
        base.witness_xi = xi
        base.residuals["witness"] = res / (nA * nB)
        base.residuals["witness_lambda"] = abs(lam_w.value - lam)
    return base


def is_eps_parallel(T1, T2, eps: float, tol: Tolerances = DEFAULT_TOL):
    """Decide ``T1 ||^eps T2``: ``inf_mu ||T1 + mu T2|| <= eps ||T1||``.

    Returns ``(verdict, OptResult)``. ``opt_tol`` is added to the right-hand
    side as optimizer slack. At ``eps = 0`` a true verdict implies exact
    parallelism; the converse fails for non-proportional parallel pairs.
    """
    if not (0.0 <= eps < 1.0):
        raise DomainError(f"eps must lie in [0, 1), got {eps!r}")
    A, B = check_same_shape(T1, T2)
    res = min_over_plane(A, B, tol)
    return bool(res.value <= eps * op_norm(A) + tol.opt_tol), res


def bs_orthogonal_sup(T1, T2, tol: Tolerances = DEFAULT_TOL, return_witness: bool = False):
    """``sup |(T1 xi | eta)|`` over unit ``xi, eta`` with ``(T2 xi | eta) = 0``.

    For fixed ``xi`` the optimal ``eta`` is the normalized component of
    ``T1 xi`` orthogonal to ``T2 xi``; the remaining maximization over ``xi``
    runs the same sampled sphere ascent as :func:`sphere_sup_M` on the
    resulting value.
    """
    A, B = check_same_shape(T1, T2)
    zero = tol.lin_tol

    def eta_for(xi):
        a, b = A @ xi, B @ xi
        bn = np.linalg.norm(b)
        perp = a
        if bn > zero:
            w = b / bn
            # two Gram-Schmidt passes keep eta orthogonal to T2 xi to roundoff
            for _ in range(2):
                perp = perp - inner(perp, w) * w
        pn = np.linalg.norm(perp)
        if pn <= 8.0 * np.finfo(float).eps * np.linalg.norm(a):
            return np.zeros_like(a), 0.0
        eta = perp / pn
        return eta, abs(inner(a, eta))

    def batch(X):
        a, b = A @ X, B @ X
        bb = np.sum(np.abs(b) ** 2, axis=0)
        coef = np.where(bb > zero**2, np.sum(np.conj(b) * a, axis=0) / np.where(bb > zero**2, bb, 1.0), 0.0)
        return np.linalg.norm(a - coef * b, axis=0)

    def fun_grad(xi):
        val, g = _M_value_grad(A, B, xi, zero)
        root = math.sqrt(max(val, 0.0))
        return root, (g / (2.0 * root) if root > 0 else g)

    budget = tol.with_(sample_budget=max(8, tol.sample_budget // 4))
    best, best_xi = -1.0, None
    for x0 in sphere_starts(A, B, budget, batch, stream=1):
        _, xi = sphere_ascent(fun_grad, x0)
        v = max((eta_for(xi)[1], xi), (eta_for(x0)[1], x0), key=lambda t: t[0])
        if v[0] > best:
            best, best_xi = v
    if return_witness:
        eta, _ = eta_for(best_xi)
        return best, best_xi, eta
    return best


def eps_pointwise_bound_check(T1, T2, eps: float, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Sample ``|(T1 xi|T2 xi)|^2 >= ||T1 xi||^2 ||T2 xi||^2 - eps^2 ||T1||^2 ||T2||^2``.

    This is a necessary condition for ``T1 ||^eps T2``; true iff no sampled
    unit vector violates it by more than ``lin_tol``.
    """
    A, B = check_same_shape(T1, T2)
    X = random_unit_vectors(A.shape[1], int(tol.sample_budget), tol.rng(104729))
    a, b = A @ X, B @ X
    lhs = np.abs(np.sum(np.conj(b) * a, axis=0)) ** 2
    rhs = (np.sum(np.abs(a) ** 2, axis=0) * np.sum(np.abs(b) ** 2, axis=0)
           - (eps * op_norm(A) * op_norm(B)) ** 2)
    scale = 1.0 + (op_norm(A) * op_norm(B)) ** 2
    return bool(np.all(lhs >= rhs - tol.lin_tol * scale))


def vector_eps_parallel(xi, eta, eps: float, tol: Tolerances = DEFAULT_TOL, psi=None):
    """Four equivalent tests of ``xi ||^eps eta`` for Hilbert space vectors.

    ``orth_complement``
        ``sup |(xi | zeta)|`` over unit ``zeta`` orthogonal to ``eta`` is at most ``eps ||xi||``.
    ``inner_product``
        ``|(xi | eta)| >= sqrt(1 - eps^2) ||xi|| ||eta||``.
    ``projection``
        ``|| ||eta||^2 xi - (xi | eta) eta || <= eps ||xi|| ||eta||^2``.
    ``rank_one``
        ``xi (x) psi ||^eps eta (x) psi`` as operators, for a unit ``psi``.

    Returns ``(verdict, details)``; ``details["agree"]`` reports whether all
    four flags coincide.
    """
    if not (0.0 <= eps < 1.0):
        raise DomainError(f"eps must lie in [0, 1), got {eps!r}")
    xi = check_vector(xi, name="xi")
    eta = check_vector(eta, name="eta")
    if xi.shape != eta.shape:
        raise InputError(f"shape mismatch: xi {xi.shape}, eta {eta.shape}")
    n = xi.size
    nx, ne = np.linalg.norm(xi), np.linalg.norm(eta)
    slack = tol.lin_tol * (1.0 + nx) * (1.0 + ne) ** 2

    # orthonormal basis of eta-perp from a full SVD of eta as a column
    if ne > 0:
        U = np.linalg.svd(eta[:, None])[0]
        Q = U[:, 1:]
    else:
        Q = np.eye(n, dtype=complex)
    orth = float(np.linalg.norm(adjoint(Q) @ xi)) if Q.shape[1] else 0.0
    ip = abs(inner(xi, eta))
    proj = float(np.linalg.norm(ne**2 * xi - inner(xi, eta) * eta))

    if psi is None:
        psi = np.zeros(n, dtype=complex)
        psi[0] = 1.0
    psi = check_vector(psi, name="psi")
    psi = psi / np.linalg.norm(psi)
    R1, R2 = np.outer(xi, np.conj(psi)), np.outer(eta, np.conj(psi))
    ok_rank, plane = is_eps_parallel(R1, R2, eps, tol)

    conds = {
        "orth_complement": {"value": orth, "bound": eps * nx, "satisfied": bool(orth <= eps * nx + slack)},
        "inner_product": {"value": ip, "bound": math.sqrt(1 - eps**2) * nx * ne,
                          "satisfied": bool(ip >= math.sqrt(1 - eps**2) * nx * ne - slack)},
        "projection": {"value": proj, "bound": eps * nx * ne**2,
                       "satisfied": bool(proj <= eps * nx * ne**2 + slack)},
        "rank_one": {"value": plane.value, "bound": eps * nx, "satisfied": ok_rank},
    }
    flags = [c["satisfied"] for c in conds.values()]
    verdict = conds["orth_complement"]["satisfied"]
    return verdict, {"conditions": conds, "agree": all(f == verdict for f in flags)}


def _eigen_witness(T, nT, tol):
    # unit eigenvectors whose eigenvalue has modulus ||T|| (within dec_rel)
    eigs = eigvals_qr(T)
    sel = eigs[np.abs(eigs) >= (1.0 - tol.dec_rel) * nT]
    best = (np.inf, None, None)
    if sel.size:
        V = eigvecs(T, sel)
        for k, lam in enumerate(sel):
            x = V[:, k]
            phase = lam / abs(lam)
            r = float(np.linalg.norm(T @ x - phase * nT * x))
            if r < best[0]:
                best = (r, x, phase)
    return best


def identity_parallel_suite(T, m_max: int = 4, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Five equivalent tests of ``T || I``.

    ``identity``: ``T || I``; ``adjoint``: ``T || T^*``; ``approx_eigenvector``:
    a unit ``xi`` with ``||T xi - lam ||T|| xi|| <= 1e-6 ||T||``; ``powers_identity``:
    ``T^m || I`` for every ``m <= m_max``; ``powers_adjoint``: ``T^m || (T^*)^m``
    for every ``m <= m_max``.

    The eigenvector search uses eigenvalues of modulus ``||T||``; when none
    qualifies it falls back to the top right singular vector of
    ``T + lam* I`` at the triangle maximizer.
    """
    T = check_matrix(T, square=True)
    if int(m_max) != m_max or m_max < 1:
        raise InputError(f"m_max must be a positive integer, got {m_max!r}")
    nT = op_norm(T)
    if nT == 0.0:
        raise DomainError("identity_parallel_suite: T must be nonzero")
    n = T.shape[0]
    I = identity(n)
    rep_i = is_exact_parallel(T, I, tol)
    rep_a = is_exact_parallel(T, adjoint(T), tol)

    res, xi, lam = _eigen_witness(T, nT, tol)
    source = "eigenvector"
    if xi is None or res > 1e-6 * nT:
        S = T + rep_i.lambda_star.value * I
        x = np.conj(np.linalg.svd(S)[2][0])
        c = inner(T @ x, x)
        ph = c / abs(c) if c != 0 else 1.0
        r = float(np.linalg.norm(T @ x - ph * nT * x))
        if r < res:
            res, xi, lam, source = r, x, ph, "optimizer"
    approx = {"residual": res / nT, "satisfied": bool(res <= 1e-6 * nT),
              "marginal": bool(1e-7 * nT < res <= 1e-5 * nT), "source": source,
              "lambda": lam, "xi": xi}

    pow_i, pow_a = [], []
    P = np.eye(n, dtype=complex)
    for _ in range(int(m_max)):
        P = P @ T
        pow_i.append(is_exact_parallel(P, I, tol))
        pow_a.append(is_exact_parallel(P, adjoint(P), tol))

    def entry(rep):
        return {"value": rep.triangle_value, "target": rep.norm_sum,
                "residual": rep.residuals["triangle_gap"], "satisfied": rep.verdict,
                "marginal": rep.marginal, "lambda": rep.lambda_star}

    flags = {
        "identity": entry(rep_i),
        "adjoint": entry(rep_a),
        "approx_eigenvector": approx,
        "powers_identity": {"satisfied": all(r.verdict for r in pow_i),
                            "marginal": any(r.marginal for r in pow_i),
                            "per_power": [entry(r) for r in pow_i]},
        "powers_adjoint": {"satisfied": all(r.verdict for r in pow_a),
                           "marginal": any(r.marginal for r in pow_a),
                           "per_power": [entry(r) for r in pow_a]},
    }
    values = [f["satisfied"] for f in flags.values()]
    return {
        "verdict": rep_i.verdict,
        "characterizations": flags,
        "agree": all(v == values[0] for v in values),
        "marginal": any(f["marginal"] for f in flags.values()),
        "daugavet": {"norm_T_plus_lambda_I": rep_i.triangle_value, "norm_T_plus_one": nT + 1.0},
    }


def _commutator_norms(T, S):
    return op_norms(T[None] @ S - S @ T[None])


def derivation_norm(T, tol: Tolerances = DEFAULT_TOL):
    """Bracket the norm of the inner derivation ``S -> T S - S T``.

    Returns ``(lower, upper, S_witness)``. ``upper = 2 inf_mu ||T + mu I||`` and
    ``lower`` is the best ``||T S - S T||`` over norm-one candidates:

    * normalized random matrices,
    * rank-one ``u v^*`` built from pairs of eigenvectors of ``T``,
    * reflections ``I - 2 xi xi^*`` through the unit vector maximizing
      ``||T xi - (T xi | xi) xi||``,

    followed by alternating ascent from the best candidate: with ``(p, q)``
    the top singular pair of ``T S - S T``, the next ``S`` is the unitary
    polar factor that maximizes ``Re tr(S K)``, ``K = q p^* T - T q p^*``.
    """
    T = check_matrix(T, square=True)
    n = T.shape[0]
    I = identity(n)
    plane = min_over_plane(T, I, tol)
    upper = 2.0 * plane.value

    rng = tol.rng(15485863)
    count = max(8, int(tol.sample_budget) // 8)
    G = ginibre(n, n * count, rng).reshape(n, count, n).transpose(1, 0, 2)
    G = G / op_norms(G)[:, None, None]
    cands = [G]
    V = eigvecs(T)
    rank1 = [np.outer(V[:, i], np.conj(V[:, j])) for i in range(n) for j in range(n) if i != j]
    if rank1:
        cands.append(np.array(rank1))
    _, xi = sphere_argmax_M(T, I, tol)
    cands.append((I - 2.0 * np.outer(xi, np.conj(xi)))[None])
    S_all = np.concatenate(cands)
    S_all = S_all / np.where(op_norms(S_all) > 0, op_norms(S_all), 1.0)[:, None, None]
    vals = _commutator_norms(T, S_all)
    k = int(np.argmax(vals))
    lower, S = float(vals[k]), S_all[k]

    for _ in range(100):
        X = T @ S - S @ T
        u, s, vh = np.linalg.svd(X)
        if s[0] == 0.0:
            break
        p, q = u[:, 0], np.conj(vh[0])
        K = np.outer(q, np.conj(p)) @ T - T @ np.outer(q, np.conj(p))
        Uk, _, Vkh = np.linalg.svd(K)
        S_new = adjoint(Vkh) @ adjoint(Uk)
        val = float(op_norms((T @ S_new - S_new @ T)[None])[0])
        if val <= lower * (1.0 + 1e-15):
            break
        lower, S = val, S_new
    if lower > upper + tol.opt_tol * (1.0 + upper):
        raise NumericError("derivation lower bound exceeds the upper bound", residual=lower - upper)
    return lower, upper, S


def unitary_orbit_check(T1, T2, U, eps: float, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Check that parallelism to ``I`` is preserved between ``T1`` and ``T2``.

    ``T2`` is meant to be ``U^* T1 U`` (not enforced). True iff
    ``T1 || I`` and ``T2 || I`` agree and ``T1 ||^eps I`` and ``T2 ||^eps I``
    agree.

    Raises
    ------
    DomainError
        If ``U`` is not unitary within ``lin_tol``.
    """
    A, B = check_same_shape(T1, T2, square=True)
    U = check_matrix(U, name="U", square=True)
    if U.shape != A.shape:
        raise InputError(f"U has shape {U.shape}, expected {A.shape}")
    n = A.shape[0]
    if float(np.max(np.abs(adjoint(U) @ U - np.eye(n)))) > tol.lin_tol * 10 * n:
        raise DomainError("unitary_orbit_check: U is not unitary")
    I = identity(n)
    exact = [is_exact_parallel(X, I, tol).verdict for X in (A, B)]
    approx = [is_eps_parallel(X, I, eps, tol)[0] for X in (A, B)]
    return bool(exact[0] == exact[1] and approx[0] == approx[1])


def _rank_one_sup(terms, n, tol, stream, extra_starts=()):
    """Estimate ``sup ||sum_i c_i A_i (xi eta^*) B_i||`` over unit ``xi``, ``eta``.

    Sampling plus alternating ascent: with ``(p, q)`` the top singular pair of
    the image, the best rank-one ``xi eta^*`` is the top singular pair of
    ``K = sum_i c_i B_i q p^* A_i``.
    """
    def image(xi, eta):
        S = np.outer(xi, np.conj(eta))
        return sum(c * (Ai @ S @ Bi) for c, Ai, Bi in terms)

    rng = tol.rng(32452843, stream)
    N = int(tol.sample_budget)
    X = random_unit_vectors(n, N, rng)
    Y = random_unit_vectors(n, N, rng)
    S = X.T[:, :, None] * np.conj(Y.T)[:, None, :]
    img = sum(c * (Ai[None] @ S @ Bi[None]) for c, Ai, Bi in terms)
    vals = op_norms(img)
    order = np.argsort(-vals, kind="stable")[:8]
    starts = [(X[:, i], Y[:, i]) for i in order] + list(extra_starts)

    best, best_pair = -1.0, None
    for xi, eta in starts:
        val = float(np.linalg.norm(image(xi, eta), 2))
        for _ in range(200):
            u, s, vh = np.linalg.svd(image(xi, eta))
            if s[0] == 0.0:
                break
            p, q = u[:, 0], np.conj(vh[0])
            qp = np.outer(q, np.conj(p))
            K = sum(c * (Bi @ qp @ Ai) for c, Ai, Bi in terms)
            uk, sk, vkh = np.linalg.svd(K)
            # Re(p^* A (xi eta^*) B q) = Re(eta^* K xi)
            xi_new, eta_new = np.conj(vkh[0]), uk[:, 0]
            new = float(np.linalg.norm(image(xi_new, eta_new), 2))
            if new <= val * (1.0 + 1e-14):
                break
            xi, eta, val = xi_new, eta_new, new
        if val > best:
            best, best_pair = val, (xi, eta)
    return best, best_pair


def elementary_operator_bounds(T1, T2, eps: float, tol: Tolerances = DEFAULT_TOL):
    """Rank-one suprema of ``M(S) = T1 S T2``, ``V = M - M'`` and ``U = M + M'``.

    ``M'(S) = T2 S T1``. Returns ``(d_M, d_V, d_U)`` estimated over norm-one
    rank-one ``S``, after checking:

    * ``d_M = ||T1|| ||T2||`` within ``dec_rel``;
    * ``d_V <= 2 eps ||T1|| ||T2||`` (up to ``opt_tol`` slack);
    * ``d_U >= (2 (1 - eps) - 0.02) ||T1|| ||T2||``, the 2% absorbing the
      sampling error of the estimator.

    Raises
    ------
    DomainError
        If neither ``T1 ||^eps T2`` nor ``T2 ||^eps T1`` holds.
    NumericError
        If an estimate violates its bound.
    """
    A, B = check_same_shape(T1, T2, square=True)
    if not (0.0 <= eps < 1.0):
        raise DomainError(f"eps must lie in [0, 1), got {eps!r}")
    if not (is_eps_parallel(A, B, eps, tol)[0] or is_eps_parallel(B, A, eps, tol)[0]):
        raise DomainError("elementary_operator_bounds: pair is not eps-parallel")
    n = A.shape[0]
    nA, nB = op_norm(A), op_norm(B)
    prod = nA * nB

    top = []
    for X in (A, B):
        u, _, vh = np.linalg.svd(X)
        top.append((u[:, 0], np.conj(vh[0])))
    # xi on top of T1 and eta on top of T2^* realise ||T1|| ||T2|| for M
    seeds = [(top[0][1], top[1][0]), (top[1][1], top[0][0])]
    d_M, _ = _rank_one_sup([(1.0, A, B)], n, tol, 0, seeds)
    d_V, _ = _rank_one_sup([(1.0, A, B), (-1.0, B, A)], n, tol, 1, seeds)
    d_U, _ = _rank_one_sup([(1.0, A, B), (1.0, B, A)], n, tol, 2, seeds)

    if abs(d_M - prod) > tol.dec_rel * max(prod, np.finfo(float).tiny):
        raise NumericError("rank-one norm of T1 S T2 differs from ||T1|| ||T2||", residual=d_M - prod)
    if d_V > 2.0 * eps * prod + tol.opt_tol * (1.0 + prod):
        raise NumericError("d(V) exceeds 2 eps ||T1|| ||T2||", residual=d_V - 2.0 * eps * prod)
    if d_U < (2.0 * (1.0 - eps) - 0.02) * prod:
        raise NumericError("d(U) estimate below 2 (1 - eps) ||T1|| ||T2||",
                           residual=(2.0 * (1.0 - eps) - 0.02) * prod - d_U)
    return d_M, d_V, d_U


def make_parallel_pair(n: int, seed: int):
    """Random exactly parallel pair ``(T1, T2)`` with ``lam = 1``.

    Both operators share the top singular pair ``(u, v)``; the remainders act
    from ``v``-perp to ``u``-perp with norm at most half the smaller top
    singular value, so ``(T1 v | T2 v) = ||T1|| ||T2||``.
    """
    return aligned_pair(n, n, check_random_state(seed))
