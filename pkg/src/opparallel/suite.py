"""Randomized certification suite over seeded case families.

Every case draws from its own stream ``default_rng([seed, family_id, case])``,
so results do not depend on scheduling or on which other cases run.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import cstar, parallel, schatten
from .exceptions import DomainError, InputError, NumericError
from .generators import (
    aligned_pair,
    ginibre,
    isometry_parallel_pair,
    perturbed_pair,
    random_hermitian,
    random_nilpotent,
    random_normal,
    random_unitary,
)
from .linalg import DEFAULT_TOL, Tolerances, adjoint, identity, op_norm
from .minimax import min_over_plane, sphere_sup_M

FAMILIES = ("random", "parallel-pair", "normal", "nilpotent", "unitary-orbit", "module", "schatten")
_FAMILY_ID = {name: i for i, name in enumerate(FAMILIES)}
_SCHATTEN_P = (1.25, 1.5, 2.0)
# sphere-based bridges are checked up to this dimension
_BRIDGE_DIM = 6


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 0
    cases: int = 200
    max_dim: int = 8
    families: tuple = FAMILIES
    tolerances: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        if isinstance(self.cases, bool) or int(self.cases) != self.cases or self.cases < 1:
            raise InputError(f"cases must be a positive integer, got {self.cases!r}")
        if isinstance(self.max_dim, bool) or int(self.max_dim) != self.max_dim or not 1 <= self.max_dim <= 64:
            raise InputError(f"max_dim must be an integer in [1, 64], got {self.max_dim!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise InputError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        fams = tuple(self.families)
        unknown = [f for f in fams if f not in _FAMILY_ID]
        if unknown or not fams:
            raise InputError(f"unknown or empty families {unknown or fams!r}; choose from {', '.join(FAMILIES)}")
        # canonical order, no duplicates
        object.__setattr__(self, "families", tuple(f for f in FAMILIES if f in fams))
        object.__setattr__(self, "cases", int(self.cases))
        object.__setattr__(self, "max_dim", int(self.max_dim))
        object.__setattr__(self, "seed", int(self.seed))

    def to_dict(self) -> dict:
        return {"seed": self.seed, "cases": self.cases, "max_dim": self.max_dim,
                "families": list(self.families), "tolerances": self.tolerances}


@dataclass
class SuiteReport:
    config: SuiteConfig
    families: dict
    worst_residuals: dict
    marginal: list
    failures: list
    informational: dict
    wall_time: float = field(default=0.0, compare=False)

    @property
    def hard_failures(self) -> int:
        return sum(f["failed"] for f in self.families.values())

    @property
    def ok(self) -> bool:
        return self.hard_failures == 0

    def to_dict(self) -> dict:
        # wall time is reported separately so that reports are reproducible
        return {
            "config": self.config,
            "families": self.families,
            "worst_residuals": self.worst_residuals,
            "marginal": self.marginal,
            "failures": self.failures,
            "informational": self.informational,
            "hard_failures": self.hard_failures,
            "ok": self.ok,
        }


class _Case:
    """Collects named checks for one case."""

    def __init__(self):
        self.checks = {}

    def add(self, name, ok, residual=0.0, hard=True, marginal=False):
        r = float(residual)
        self.checks[name] = {"ok": bool(ok), "residual": r if math.isfinite(r) else float("inf"),
                             "hard": hard, "marginal": bool(marginal)}


def _dim(case, max_dim, low=1, cap=None):
    hi = max_dim if cap is None else min(max_dim, cap)
    low = min(low, hi)
    return low + case % (hi - low + 1)


def _pair_checks(c, A, B, tol, bridges):
    rep = parallel.characterization_suite(A, B, tol)
    spec_ok = parallel.spectral_criterion(A, B, tol)[0]
    marg = rep.to_dict()["marginal"]
    c.add("path_agreement", marg or (rep.agree and spec_ok == rep.verdict),
          max(ch["residual"] for ch in rep.characterizations.values() if ch["satisfied"]) if rep.verdict else 0.0,
          marginal=marg)
    if rep.verdict:
        c.add("witness_residual", rep.residuals["witness"] <= 1e-5, rep.residuals["witness"])
    c.add("symmetry", marg or parallel.is_exact_parallel(B, A, tol).verdict == rep.verdict, marginal=marg)
    g = complex(np.exp(0.7j) * 1.3)
    inv = [parallel.is_exact_parallel(adjoint(A), adjoint(B), tol).verdict,
           parallel.is_exact_parallel(-2.0 * A, 0.5 * B, tol).verdict,
           parallel.is_exact_parallel(g * A, g * B, tol).verdict]
    c.add("exact_invariance", marg or all(v == rep.verdict for v in inv), marginal=marg)

    nA = op_norm(A)
    plane = min_over_plane(A, B, tol)
    eps = 0.5
    ok_eps = plane.value <= eps * nA + tol.opt_tol
    m_eps = abs(plane.value - eps * nA) <= 10 * tol.dec_rel * nA
    inv_eps = [parallel.is_eps_parallel(adjoint(A), adjoint(B), eps, tol)[0],
               parallel.is_eps_parallel(g * A, g * B, eps, tol)[0]]
    c.add("eps_invariance", m_eps or all(v == ok_eps for v in inv_eps), marginal=m_eps)
    if ok_eps:
        c.add("eps_monotone", parallel.is_eps_parallel(A, B, 0.75, tol)[0])
    zero = parallel.is_eps_parallel(A, B, 0.0, tol)[0]
    c.add("zero_eps_implies_exact", (not zero) or rep.verdict)
    c.add("zero_eps_converse", zero == rep.verdict, hard=False)

    eps_m = plane.value / nA if nA > 0 else 0.0
    if eps_m < 1.0:
        c.add("eps_pointwise_bound", parallel.eps_pointwise_bound_check(A, B, min(eps_m + tol.dec_rel, 0.999999), tol))
    if bridges:
        sup = sphere_sup_M(A, B, tol)
        c.add("plane_sphere_bridge", abs(plane.value**2 - sup) <= 1e-5, abs(plane.value**2 - sup))
        bs = parallel.bs_orthogonal_sup(A, B, tol)
        c.add("orthogonal_sup_bridge", abs(bs - plane.value) <= 1e-5, abs(bs - plane.value))
    return rep


def _family_random(rng, case, cfg, tol):
    c = _Case()
    n = _dim(case, cfg.max_dim, 1)
    A, B = ginibre(n, n, rng), ginibre(n, n, rng)
    _pair_checks(c, A, B, tol, n <= _BRIDGE_DIM)
    return c


def _family_parallel_pair(rng, case, cfg, tol):
    c = _Case()
    n = _dim(case, cfg.max_dim, 1)
    A, B = aligned_pair(n, n, rng)
    rep = _pair_checks(c, A, B, tol, False)
    c.add("generator_parallel", rep.verdict, rep.residuals["triangle_gap"])
    c.add("all_characterizations", all(ch["satisfied"] for ch in rep.characterizations.values()))
    if n >= 2:
        E = ginibre(n, n, rng)
        E *= 0.3 * op_norm(B) / op_norm(E)
        c.add("perturbation_breaks", not parallel.is_exact_parallel(A, B + E, tol).verdict, hard=False)
    return c


def _family_normal(rng, case, cfg, tol):
    c = _Case()
    n = _dim(case, cfg.max_dim, 1, cap=_BRIDGE_DIM)
    T = random_normal(n, rng)
    rep = parallel.identity_parallel_suite(T, 4, tol)
    flags = [f["satisfied"] for f in rep["characterizations"].values()]
    c.add("identity_five_way", all(flags), 1.0 - sum(flags) / len(flags), marginal=rep["marginal"])
    lower, upper, _ = parallel.derivation_norm(T, tol)
    rel = 1.0 - lower / upper if upper > 0 else 0.0
    c.add("derivation_two_percent", lower >= 0.98 * upper - tol.opt_tol * (1.0 + upper), rel)
    c.add("derivation_upper", lower <= upper + tol.opt_tol * (1.0 + upper), max(0.0, lower - upper))
    return c


def _family_nilpotent(rng, case, cfg, tol):
    c = _Case()
    n = _dim(case, cfg.max_dim, 2)
    T = random_nilpotent(n, rng)
    rep = parallel.identity_parallel_suite(T, 4, tol)
    flags = [f["satisfied"] for f in rep["characterizations"].values()]
    c.add("identity_five_way", not any(flags), sum(flags) / len(flags), marginal=rep["marginal"])
    return c


def _family_unitary_orbit(rng, case, cfg, tol):
    c = _Case()
    n = _dim(case, cfg.max_dim, 1)
    U = random_unitary(n, rng)
    T = ginibre(n, n, rng) if case % 2 else random_hermitian(n, rng)
    c.add("orbit_consistent", parallel.unitary_orbit_check(T, adjoint(U) @ T @ U, U, 0.5, tol))
    if case % 2 == 0:
        c.add("hermitian_parallel_identity", parallel.is_exact_parallel(adjoint(U) @ T @ U, identity(n), tol).verdict)
    return c


def _family_module(rng, case, cfg, tol):
    c = _Case()
    dims = min(cfg.max_dim, 5)
    n, k = 1 + case % dims, 1 + (case // dims) % dims
    kind = case % 3
    if kind == 0:
        X, Y = aligned_pair(n, k, rng)
    elif kind == 1:
        X, Y = ginibre(n, k, rng), ginibre(n, k, rng)
    else:
        if n < k:
            n, k = k, n
        X, Y = isometry_parallel_pair(n, k, rng)
    x, y = cstar.ModuleElement(X), cstar.ModuleElement(Y)
    rep = cstar.module_parallel_suite(x, y, tol)
    c.add("six_way_agreement", rep["marginal"] or rep["agree"], marginal=rep["marginal"])
    if kind != 1:
        c.add("generator_parallel", rep["verdict"])
    if rep["verdict"]:
        c.add("state_residual", rep["state_residual"] <= 1e-6, rep["state_residual"])
    iso = rep["linking_isometry"]
    c.add("linking_isometry", iso["norm_error"] <= 1e-10 and iso["product_error"] <= tol.lin_tol, iso["norm_error"])
    c.add("cauchy_schwarz", cstar.cauchy_schwarz_check(x, y, rep.get("state"), tol))
    if rep["verdict"]:
        ratio = cstar.ratio_identity_check(x, y, tol)
        c.add("ratio_identity", ratio["part_i"]["satisfied"], ratio["part_i"]["residual"])
        if "part_ii" in ratio:
            c.add("ratio_converse", ratio["part_ii"]["converse_consistent"], ratio["part_ii"]["identity_residual"])
    eps = min_over_plane(X, Y, tol).value / op_norm(X)
    if eps < 1.0:
        c.add("eps_state_inequality", cstar.eps_state_inequality(x, y, min(eps + tol.dec_rel, 0.999999), tol))
    return c


def _family_schatten(rng, case, cfg, tol):
    c = _Case()
    n = _dim(case, cfg.max_dim, 1, cap=6)
    p = _SCHATTEN_P[case % 3]
    T = ginibre(n, n, rng)
    if (case // 3) % 2 == 0:
        z = complex(rng.standard_normal(), rng.standard_normal())
        S = z * T
    else:
        S = ginibre(n, n, rng)
    par, _ = schatten.schatten_parallel(T, S, p, tol)
    dep = schatten.linear_dependence_test(T, S, tol)
    c.add(f"rigidity_p{p}", par == dep)
    c.add("clarkson", schatten.clarkson_check(T, S, p, tol))
    _, _, jr = schatten.jordan_split(random_hermitian(n, rng), tol)
    c.add("jordan_split", jr["satisfied"], jr["additivity_residual"])
    return c


_RUNNERS = {
    "random": _family_random,
    "parallel-pair": _family_parallel_pair,
    "normal": _family_normal,
    "nilpotent": _family_nilpotent,
    "unitary-orbit": _family_unitary_orbit,
    "module": _family_module,
    "schatten": _family_schatten,
}


def run_case(cfg: SuiteConfig, family: str, case: int) -> dict:
    """Run one case; exceptions other than input errors count as a failed check."""
    rng = np.random.default_rng([cfg.seed, _FAMILY_ID[family], case])
    try:
        checks = _RUNNERS[family](rng, case, cfg, cfg.tolerances).checks
    except (NumericError, DomainError) as exc:
        res = float(getattr(exc, "residual", float("nan")))
        checks = {"exception": {"ok": False, "residual": res if math.isfinite(res) else 0.0,
                                "hard": True, "marginal": False, "message": str(exc)}}
    return {"family": family, "case": case, "checks": checks}


def _run_star(args):
    return run_case(*args)


def run_suite(cfg: SuiteConfig, jobs: int = 1) -> SuiteReport:
    """Run every configured family; ``jobs > 1`` shards cases across processes."""
    if int(jobs) != jobs or jobs < 1:
        raise InputError(f"jobs must be a positive integer, got {jobs!r}")
    start = time.perf_counter()
    tasks = [(cfg, fam, i) for fam in cfg.families for i in range(cfg.cases)]
    if jobs == 1:
        results = [run_case(*t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=int(jobs)) as pool:
            results = list(pool.map(_run_star, tasks, chunksize=max(1, len(tasks) // (8 * int(jobs)))))
    results.sort(key=lambda r: (_FAMILY_ID[r["family"]], r["case"]))

    families, worst, marginal, failures, info = {}, {}, [], [], {}
    for fam in cfg.families:
        families[fam] = {"cases": cfg.cases, "passed": 0, "failed": 0}
    for r in results:
        hard_fail = False
        for name, ch in r["checks"].items():
            key = f"{r['family']}/{name}"
            worst[key] = max(worst.get(key, 0.0), ch["residual"])
            if ch["marginal"]:
                marginal.append({"family": r["family"], "case": r["case"], "check": name})
            if not ch["hard"]:
                slot = info.setdefault(key, {"true": 0, "false": 0})
                slot["true" if ch["ok"] else "false"] += 1
            elif not ch["ok"]:
                hard_fail = True
                entry = {"family": r["family"], "case": r["case"], "check": name}
                if "message" in ch:
                    entry["message"] = ch["message"]
                failures.append(entry)
        families[r["family"]]["failed" if hard_fail else "passed"] += 1
    return SuiteReport(cfg, families, worst, marginal, failures, info,
                       wall_time=time.perf_counter() - start)
