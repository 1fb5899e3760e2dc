"""Command-line interface: ``opparallel {check,analyze,module,suite,gen}``.

Exit codes: 0 verdict true (or success), 1 verdict false (or suite hard
failures), 2 input or configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import cstar, generators, parallel, suite
from .exceptions import DomainError, InputError, NumericError
from .jsonio import dumps, load_json, load_matrix, matrix_to_dict
from .linalg import DEFAULT_TOL, Tolerances, op_norm
from .minimax import min_over_plane

EXIT_TRUE, EXIT_FALSE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

GEN_FAMILIES = ("parallel-pair", "random", "random-pair", "hermitian", "normal", "nilpotent",
                "unitary", "psd", "module-pair", "isometry-pair")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_INPUT)


def _global_flags(parser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    g = parser.add_argument_group("global options")
    g.add_argument("--tol-lin", type=float, default=d(DEFAULT_TOL.lin_tol), help="absolute tolerance for algebraic identities")
    g.add_argument("--tol-opt", type=float, default=d(DEFAULT_TOL.opt_tol), help="optimizer tolerance on objective values")
    g.add_argument("--dec-rel", type=float, default=d(DEFAULT_TOL.dec_rel), help="relative margin for verdicts")
    g.add_argument("--budget", type=int, default=d(DEFAULT_TOL.sample_budget), help="sample budget for sampled suprema")
    g.add_argument("--seed", type=int, default=d(DEFAULT_TOL.seed), help="seed for sampling and the suite")
    g.add_argument("--report", default=d(None), help="write the JSON report here instead of stdout")
    g.add_argument("--jobs", type=int, default=d(1), help="worker processes for the suite")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="opparallel", description="Exact and approximate parallelism of matrices.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="decide T1 || T2, or T1 ||^eps T2 with --eps")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--eps", type=float, default=None)
    _global_flags(p, suppress=True)

    p = sub.add_parser("analyze", help="dump every characterization value")
    p.add_argument("files", nargs="+", metavar="FILE")
    p.add_argument("--identity", action="store_true", help="run the T || I suite on the first matrix")
    p.add_argument("--m-max", type=int, default=4)
    _global_flags(p, suppress=True)

    p = sub.add_parser("module", help="Hilbert C*-module parallelism of two n x k elements")
    p.add_argument("first")
    p.add_argument("second")
    _global_flags(p, suppress=True)

    p = sub.add_parser("suite", help="run the randomized certification suite")
    p.add_argument("--cases", type=int, default=None)
    p.add_argument("--max-dim", type=int, default=None)
    p.add_argument("--families", default=None, help="comma separated subset of " + ",".join(suite.FAMILIES))
    p.add_argument("--config", default=None, help="JSON file with seed/cases/max_dim/families")
    _global_flags(p, suppress=True)

    p = sub.add_parser("gen", help="write generated matrices as JSON files")
    p.add_argument("family", help="one of " + ", ".join(GEN_FAMILIES))
    p.add_argument("n", type=int)
    p.add_argument("gen_seed", type=int, metavar="seed")
    p.add_argument("--k", type=int, default=None, help="column count for module families")
    p.add_argument("--out", default=".", help="output directory")
    _global_flags(p, suppress=True)
    return parser


def _tolerances(args) -> Tolerances:
    return Tolerances(lin_tol=args.tol_lin, opt_tol=args.tol_opt, dec_rel=args.dec_rel,
                      sample_budget=args.budget, seed=args.seed)


def _emit(args, payload, tol):
    text = dumps({"tolerances": tol, **payload})
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_check(args, tol) -> int:
    A, B = load_matrix(args.first), load_matrix(args.second)
    rep = parallel.is_exact_parallel(A, B, tol)
    payload = {"command": "check", "exact": rep}
    verdict = rep.verdict
    if args.eps is not None:
        ok, res = parallel.is_eps_parallel(A, B, args.eps, tol)
        payload["eps"] = {"eps": args.eps, "verdict": ok, "mu_star": res.argument,
                          "value": res.value, "certified_gap": res.certified_gap,
                          "degenerate": res.degenerate}
        verdict = ok
    payload["verdict"] = verdict
    _emit(args, payload, tol)
    return EXIT_TRUE if verdict else EXIT_FALSE


def cmd_analyze(args, tol) -> int:
    if len(args.files) > 2:
        raise InputError("analyze takes one or two matrix files")
    mats = [load_matrix(f) for f in args.files]
    payload: dict = {"command": "analyze"}
    if args.identity or len(mats) == 1:
        T = mats[0]
        payload["identity_suite"] = parallel.identity_parallel_suite(T, args.m_max, tol)
        lower, upper, S = parallel.derivation_norm(T, tol)
        payload["derivation"] = {"lower": lower, "upper": upper, "witness": S}
    if len(mats) == 2:
        A, B = mats
        rep = parallel.characterization_suite(A, B, tol)
        ok, r, nP, target = parallel.spectral_criterion(A, B, tol)
        res = min_over_plane(A, B, tol)
        payload["characterizations"] = rep
        payload["spectral_criterion"] = {"satisfied": ok, "spectral_radius": r, "norm": nP, "target": target}
        payload["distance_to_line"] = {"mu_star": res.argument, "value": res.value,
                                       "relative": res.value / max(op_norm(A), np.finfo(float).tiny)}
        payload["path_agreement"] = bool(rep.agree and ok == rep.verdict)
    _emit(args, payload, tol)
    return EXIT_TRUE


def _load_module(path):
    return cstar.ModuleElement.from_dict(load_json(path))


def cmd_module(args, tol) -> int:
    x, y = _load_module(args.first), _load_module(args.second)
    rep = cstar.module_parallel_suite(x, y, tol)
    _emit(args, {"command": "module", **rep}, tol)
    return EXIT_TRUE if rep["verdict"] else EXIT_FALSE


def cmd_suite(args, tol) -> int:
    conf: dict = {}
    if args.config:
        conf = load_json(args.config)
        if not isinstance(conf, dict):
            raise InputError("suite config must be a JSON object")
        extra = set(conf) - {"seed", "cases", "max_dim", "families"}
        if extra:
            raise InputError(f"unknown suite config keys: {sorted(extra)}")
    if args.cases is not None:
        conf["cases"] = args.cases
    if args.max_dim is not None:
        conf["max_dim"] = args.max_dim
    if args.families is not None:
        conf["families"] = [f.strip() for f in args.families.split(",") if f.strip()]
    conf.setdefault("seed", args.seed)
    if "families" in conf and isinstance(conf["families"], str):
        conf["families"] = [conf["families"]]
    cfg = suite.SuiteConfig(tolerances=tol.with_(seed=int(conf["seed"])), **conf)
    report = suite.run_suite(cfg, jobs=args.jobs)
    sys.stderr.write(f"suite: {report.hard_failures} hard failures, wall time {report.wall_time:.2f} s\n")
    _emit(args, {"command": "suite", "report": report}, tol)
    return EXIT_TRUE if report.ok else EXIT_FALSE


def _generate(family, n, seed, k):
    rng = generators.check_random_state(seed)
    if family == "parallel-pair":
        a, b = parallel.make_parallel_pair(n, seed)
        return {"a": a, "b": b}
    if family == "random":
        return {"": generators.ginibre(n, n, rng)}
    if family == "random-pair":
        return {"a": generators.ginibre(n, n, rng), "b": generators.ginibre(n, n, rng)}
    if family == "hermitian":
        return {"": generators.random_hermitian(n, rng)}
    if family == "normal":
        return {"": generators.random_normal(n, rng)}
    if family == "nilpotent":
        return {"": generators.random_nilpotent(n, rng)}
    if family == "unitary":
        return {"": generators.random_unitary(n, rng)}
    if family == "psd":
        return {"": generators.random_psd(n, rng)}
    k = n if k is None else k
    if family == "module-pair":
        x, y = generators.aligned_pair(n, k, rng)
    elif family == "isometry-pair":
        x, y = generators.isometry_parallel_pair(n, k, rng)
    else:
        raise InputError(f"unknown family {family!r}; choose from {', '.join(GEN_FAMILIES)}")
    return {"a": cstar.ModuleElement(x), "b": cstar.ModuleElement(y)}


def cmd_gen(args, tol) -> int:
    if args.family not in GEN_FAMILIES:
        raise InputError(f"unknown family {args.family!r}; choose from {', '.join(GEN_FAMILIES)}")
    if args.n < 1 or (args.k is not None and args.k < 1):
        raise InputError("dimensions must be positive")
    if args.gen_seed < 0:
        raise InputError("seed must be non-negative")
    out = _generate(args.family, args.n, args.gen_seed, args.k)
    os.makedirs(args.out, exist_ok=True)
    paths = []
    for suffix, obj in out.items():
        name = f"{args.family}-{args.n}-{args.gen_seed}" + (f"-{suffix}" if suffix else "") + ".json"
        path = os.path.join(args.out, name)
        d = obj.to_dict() if isinstance(obj, cstar.ModuleElement) else matrix_to_dict(obj)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps(d))
        paths.append(path)
    sys.stdout.write(dumps({"command": "gen", "family": args.family, "files": paths}))
    return EXIT_TRUE


COMMANDS = {"check": cmd_check, "analyze": cmd_analyze, "module": cmd_module,
            "suite": cmd_suite, "gen": cmd_gen}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = _tolerances(args)
        return COMMANDS[args.command](args, tol)
    except (InputError, DomainError) as exc:
        sys.stderr.write(f"opparallel {args.command}: error: {exc}\n")
        return EXIT_INPUT
    except NumericError as exc:
        sys.stderr.write(f"opparallel {args.command}: numerical failure: {exc} (residual {exc.residual:.3g})\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
