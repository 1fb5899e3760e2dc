"""Scalar optimization over the unit circle, the complex plane and the sphere.

Three primitives drive every parallelism test:

* :func:`max_over_circle` -- ``max_{|lam|=1} ||T1 + lam T2||``,
* :func:`min_over_plane`  -- ``inf_{mu in C} ||T1 + mu T2||``,
* :func:`sphere_sup_M`    -- ``sup_{|xi|=1} ||T1 xi||^2 - |(T1 xi|T2 xi)|^2/||T2 xi||^2``,
  whose value equals the square of the plane infimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .generators import random_unit_vectors
from .linalg import DEFAULT_TOL, Tolerances, adjoint, check_same_shape, op_norms

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class UnimodularScalar:
    """``lam = exp(i theta)`` with ``theta`` in ``[0, 2 pi)``."""

    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)

    @property
    def value(self) -> complex:
        return complex(math.cos(self.theta), math.sin(self.theta))

    @classmethod
    def from_complex(cls, z) -> "UnimodularScalar":
        z = complex(z)
        return cls(math.atan2(z.imag, z.real) if z != 0 else 0.0)

    def to_dict(self) -> dict:
        lam = self.value
        return {"theta": self.theta, "re": lam.real, "im": lam.imag}


@dataclass(frozen=True)
class OptResult:
    """Outcome of a scalar optimization.

    ``argument`` is the optimal ``mu`` (plane) or ``lam`` (circle);
    ``certified_gap`` bounds the distance from ``value`` to the true optimum.
    """

    argument: complex
    value: float
    iterations: int
    certified_gap: float
    degenerate: bool = False

    @property
    def unimodular(self) -> UnimodularScalar:
        return UnimodularScalar.from_complex(self.argument)

    def to_dict(self) -> dict:
        return {
            "argument": {"re": self.argument.real, "im": self.argument.imag},
            "value": self.value,
            "iterations": self.iterations,
            "certified_gap": self.certified_gap,
            "degenerate": self.degenerate,
        }


# ---------------------------------------------------------------------------
# circle maximization


def _zoom_max(objective, theta0, value0, width, points=17, xtol=1e-9):
    """Batched local refinement: resample the bracket, recentre, shrink."""
    theta, value, rounds = theta0, value0, 0
    while width > xtol:
        ts = theta + np.linspace(-0.5, 0.5, points) * width
        vs = objective(ts)
        j = int(np.argmax(vs))
        if vs[j] > value:
            theta, value = float(ts[j]), float(vs[j])
        width *= 2.0 / (points - 1)
        rounds += 1
    return theta, value, rounds


def circle_maximize(objective, lipschitz: float, scale: float, tol: Tolerances = DEFAULT_TOL,
                    grid: int = 720, coarse: int = 90) -> OptResult:
    """Maximize a function of ``theta`` of the form ``max_z Re(alpha(z) + e^{i theta} beta(z))``.

    ``objective`` maps an array of angles to an array of values. Every such
    function is, near its maximizer, bounded below by a parabola of curvature
    ``lipschitz`` (the bound on ``|beta|``), so a grid of spacing ``h`` misses
    the maximum by at most ``lipschitz * h**2 / 8``. This certifies the
    result:

    1. evaluate ``coarse`` uniform cells;
    2. drop every cell whose centre value is more than the grid bound below
       the best, split the survivors in four and repeat until the spacing is
       at most ``2 pi / grid`` and the bound is at most ``opt_tol * scale / 2``;
    3. refine around the best sample by batched zooming.

    The pruning never discards the cell holding the maximizer, so the result
    carries the same certificate as a full uniform grid at the final spacing.
    Ties are broken toward the smallest angle.
    """
    if lipschitz <= 0.0:
        v = float(objective(np.zeros(1))[0])
        return OptResult(1.0 + 0j, v, 0, 0.0, degenerate=True)

    target = 0.5 * tol.opt_tol * max(scale, np.finfo(float).tiny)
    h_stop = min(TWO_PI / grid, math.sqrt(8.0 * target / lipschitz))
    h = TWO_PI / coarse
    thetas = h * np.arange(coarse)
    vals = objective(thetas)
    evaluations = coarse
    split = np.array([-0.375, -0.125, 0.125, 0.375])
    while True:
        best = float(vals.max())
        keep = vals >= best - lipschitz * h * h / 8.0
        thetas, vals = thetas[keep], vals[keep]
        if h <= h_stop:
            break
        thetas = (thetas[:, None] + split[None, :] * h).ravel()
        h /= 4.0
        vals = objective(thetas)
        evaluations += thetas.size
    upper = best + lipschitz * h * h / 8.0

    # smallest angle among the (numerically) best samples
    ties = np.flatnonzero(vals >= best - 4.0 * np.finfo(float).eps * max(scale, 1.0))
    j = ties[int(np.argmin(np.mod(thetas[ties], TWO_PI)))]
    theta0, value, rounds = _zoom_max(objective, float(thetas[j]), float(vals[j]), 2.0 * h)
    theta0 = theta0 % TWO_PI
    if TWO_PI - theta0 < 1e-8:
        # wrap-around maximizer: theta = 0 is the smaller representative
        v0 = float(objective(np.zeros(1))[0])
        if v0 >= value - 4.0 * np.finfo(float).eps * max(scale, 1.0):
            theta0, value = 0.0, max(value, v0)
    lam = complex(math.cos(theta0), math.sin(theta0))
    if theta0 == 0.0:
        lam = 1.0 + 0j
    return OptResult(lam, value, rounds, max(0.0, upper - value))


def _op_norm_circle_objective(A, B):
    # ||A + z B||^2 is the top eigenvalue of a Hermitian Gram matrix
    if A.shape[1] <= A.shape[0]:
        P = adjoint(A) @ A + adjoint(B) @ B
        Q = adjoint(A) @ B
    else:
        P = A @ adjoint(A) + B @ adjoint(B)
        Q = B @ adjoint(A)
    Qh = adjoint(Q)

    def objective(thetas):
        z = np.exp(1j * np.asarray(thetas, dtype=float))[:, None, None]
        H = P[None] + z * Q[None] + np.conj(z) * Qh[None]
        top = np.linalg.eigvalsh(H)[:, -1]
        return np.sqrt(np.clip(top, 0.0, None))

    return objective


def max_over_circle(T1, T2, tol: Tolerances = DEFAULT_TOL) -> OptResult:
    """``max_{|lam|=1} ||T1 + lam T2||`` with a certified optimality gap.

    Examples
    --------
    >>> import numpy as np
    >>> r = max_over_circle(np.diag([1.0, 0.0]), np.eye(2))
    >>> round(r.value, 12), r.argument
    (2.0, (1+0j))
    """
    A, B = check_same_shape(T1, T2)
    nA, nB = (float(v) for v in op_norms(np.stack([A, B])))
    total = nA + nB
    res = circle_maximize(_op_norm_circle_objective(A, B), nB, total, tol)
    slack = 1e-12 * max(total, 1.0)
    if res.value > total + slack or res.value < max(nA, nB) - slack:
        from .exceptions import NumericError

        raise NumericError("circle maximum violates the triangle bounds",
                           residual=res.value - total)
    return OptResult(res.argument, min(res.value, total), res.iterations,
                     res.certified_gap, res.degenerate)


# ---------------------------------------------------------------------------
# plane minimization


def _value_subgrad(A, B, mu):
    u, s, vh = np.linalg.svd(A + mu * B)
    w = np.conj(u[:, 0]) @ B @ np.conj(vh[0])
    return float(s[0]), np.array([w.real, -w.imag])


def min_over_plane(T1, T2, tol: Tolerances = DEFAULT_TOL, max_iter: int = 2000) -> OptResult:
    """``inf_{mu in C} ||T1 + mu T2||`` by a coarse disk grid and ellipsoid cuts.

    The objective is convex in ``(Re mu, Im mu)`` and grows like
    ``|mu| ||T2|| - ||T1||``, so every minimizer lies in the disk
    ``|mu| <= 2 ||T1|| / ||T2||``. That disk is the initial ellipsoid; each
    step cuts it with the subgradient ``(Re w, -Im w)``, ``w = u^* T2 v``,
    taken from a top singular pair ``(u, v)`` of ``T1 + mu T2``. Any top pair
    gives a valid subgradient, so repeated top singular values need no
    special handling. Cut depths provide a certified lower bound.

    A zero ``T2`` is reported as degenerate with ``mu = 0``.
    """
    A, B = check_same_shape(T1, T2)
    nA, nB = (float(v) for v in op_norms(np.stack([A, B])))
    if nB <= tol.lin_tol:
        return OptResult(0j, nA, 0, 0.0, degenerate=True)
    if nA == 0.0:
        return OptResult(0j, 0.0, 0, 0.0)

    radius = 2.0 * nA / nB
    rings = radius * np.arange(1, 13) / 12.0
    angles = np.exp(1j * TWO_PI * np.arange(24) / 24.0)
    # the least-squares point is exact when T1 is a multiple of T2
    mu_ls = -complex(np.vdot(B, A)) / complex(np.vdot(B, B))
    pts = np.concatenate([[0j, mu_ls], (rings[:, None] * angles[None, :]).ravel()])
    vals = op_norms(A[None] + pts[:, None, None] * B[None])
    j = int(np.argmin(vals))
    upper, best = float(vals[j]), complex(pts[j])

    target = 1e-3 * tol.opt_tol * nA
    center = np.zeros(2)
    P = radius * radius * np.eye(2)
    lower = 0.0
    it = 0
    for it in range(1, max_iter + 1):
        mu = complex(center[0], center[1])
        val, g = _value_subgrad(A, B, mu)
        if val < upper:
            upper, best = val, mu
        gPg = float(g @ P @ g)
        if gPg <= 0.0:
            lower = max(lower, val)
            break
        depth = math.sqrt(gPg)
        lower = max(lower, val - depth)
        if upper - lower <= target:
            break
        Pg = (P @ g) / depth
        center = center - Pg / 3.0
        P = (4.0 / 3.0) * (P - (2.0 / 3.0) * np.outer(Pg, Pg))
        P = 0.5 * (P + P.T)

    # among equally good points prefer the one closest to 0 along the ray
    if best != 0:
        def at(t):
            return float(op_norms((A + t * best * B)[None])[0])
        if at(0.0) <= upper:
            best = 0j
        else:
            lo_t, hi_t = 0.0, 1.0
            for _ in range(50):
                mid = 0.5 * (lo_t + hi_t)
                if at(mid) <= upper:
                    hi_t = mid
                else:
                    lo_t = mid
            best = hi_t * best
        upper = min(upper, float(op_norms((A + best * B)[None])[0]))
    return OptResult(complex(best), upper, it, max(0.0, upper - max(lower, 0.0)))


# ---------------------------------------------------------------------------
# sphere supremum


def _M_batch(A, B, X, zero_tol):
    a = A @ X
    b = B @ X
    aa = np.sum(np.abs(a) ** 2, axis=0)
    bb = np.sum(np.abs(b) ** 2, axis=0)
    c = np.sum(np.conj(b) * a, axis=0)
    safe = np.where(bb > zero_tol**2, bb, 1.0)
    return np.where(bb > zero_tol**2, aa - np.abs(c) ** 2 / safe, aa)


def _M_value_grad(A, B, x, zero_tol):
    a, b = A @ x, B @ x
    aa = float(np.vdot(a, a).real)
    bb = float(np.vdot(b, b).real)
    if bb <= zero_tol**2:
        return aa, 2.0 * (adjoint(A) @ a)
    c = np.vdot(b, a)
    Aha, Bha, Ahb, Bhb = adjoint(A) @ a, adjoint(B) @ a, adjoint(A) @ b, adjoint(B) @ b
    val = aa - abs(c) ** 2 / bb
    grad = Aha - (np.conj(c) * Bha + c * Ahb) / bb + (abs(c) ** 2 / bb**2) * Bhb
    return val, 2.0 * grad


def sphere_ascent(fun_grad, x0, max_iter: int = 200, ftol: float = 1e-15):
    """Maximize a smooth function on the complex unit sphere.

    Geodesic steps along the normalized Riemannian gradient, with step
    doubling on improvement and halving on failure.
    """
    x = x0 / np.linalg.norm(x0)
    val, g = fun_grad(x)
    step = 0.1
    for _ in range(max_iter):
        g = g - np.real(np.vdot(x, g)) * x
        gn = float(np.linalg.norm(g))
        if gn <= 1e-300:
            break
        d = g / gn
        while step > 1e-14:
            y = math.cos(step) * x + math.sin(step) * d
            y /= np.linalg.norm(y)
            yval, yg = fun_grad(y)
            if yval > val:
                improved = yval - val
                x, val, g = y, yval, yg
                step = min(2.0 * step, 0.5 * math.pi)
                break
            step *= 0.5
        else:
            break
        if improved <= ftol * max(abs(val), 1.0):
            break
    return val, x


def sphere_starts(A, B, tol: Tolerances, value_batch, n_best: int = 8, stream: int = 0):
    """Deterministic candidate start vectors for sphere ascent.

    Random unit samples are ranked by ``value_batch``; structural candidates
    are added: standard basis, right singular vectors of ``A`` and ``B``
    and, when ``B`` has a kernel, the top direction of ``A`` on that kernel.
    """
    n = A.shape[1]
    rng = tol.rng(7919, stream)
    X = random_unit_vectors(n, int(tol.sample_budget), rng)
    vals = value_batch(X)
    order = np.argsort(-vals, kind="stable")[:n_best]
    starts = [X[:, i] for i in order]
    structural = [np.eye(n, dtype=complex)]
    for M in (A, B):
        structural.append(np.conj(np.linalg.svd(M)[2]).T)
    _, s, vh = np.linalg.svd(B)
    kernel = np.conj(vh[np.sum(s > tol.lin_tol):]).T
    if kernel.shape[1]:
        _, _, kvh = np.linalg.svd(A @ kernel)
        structural.append((kernel @ np.conj(kvh[0]))[:, None])
    S = np.concatenate(structural, axis=1)
    svals = value_batch(S)
    for i in np.argsort(-svals, kind="stable")[:n_best]:
        starts.append(S[:, i])
    return starts


def sphere_argmax_M(T1, T2, tol: Tolerances = DEFAULT_TOL):
    """Return ``(sup M, maximizing unit vector)``; see :func:`sphere_sup_M`."""
    A, B = check_same_shape(T1, T2)
    zero_tol = tol.lin_tol

    def batch(X):
        return _M_batch(A, B, X, zero_tol)

    best_val, best_x = -np.inf, None
    for x0 in sphere_starts(A, B, tol, batch):
        v0 = float(batch(x0[:, None])[0])
        val, x = sphere_ascent(lambda x: _M_value_grad(A, B, x, zero_tol), x0)
        if v0 > val:  # kernel-branch starts can sit above the smooth branch
            val, x = v0, x0
        if val > best_val:
            best_val, best_x = val, x
    return max(float(best_val), 0.0), best_x


def sphere_sup_M(T1, T2, tol: Tolerances = DEFAULT_TOL) -> float:
    """``sup`` over unit ``xi`` of ``||T1 xi||^2 - |(T1 xi | T2 xi)|^2 / ||T2 xi||^2``.

    When ``||T2 xi|| <= lin_tol`` the second term is dropped. The estimate
    comes from ``sample_budget`` random unit vectors plus local ascent from
    the best starts, so it is a lower bound; it should meet the square of
    :func:`min_over_plane` from below.
    """
    return sphere_argmax_M(T1, T2, tol)[0]
