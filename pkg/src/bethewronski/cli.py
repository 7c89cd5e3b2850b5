"""Command-line front end.

Every subcommand prints one report on stdout and exits with

* 0 when every check passed,
* 1 when a mathematical claim was falsified (the report says which),
* 2 on a usage error (message on stderr).

Reports carry ``"schema": 1``; rationals are ``"p/q"`` strings and complex
numbers ``[re, im]`` pairs.  Nothing time-dependent goes to stdout, so the
same arguments and seed give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
import warnings
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from . import polynomial_core as pc
from . import schubert as sch
from . import sweeps
from .bethe_sl2 import (
    MasterProblem,
    SolverConfig,
    SolverWarning,
    bethe_eigenvalues,
    bethe_vector,
    generic_points,
    multiset_distance,
    singular_defect,
    solve_orbits,
)
from .errors import CoincidingPoints, NTooSmall
from .gaudin import (
    build_hamiltonians,
    commutators_vanish,
    commutes_with_sl2,
    eigen_residual,
    preserves_sing,
    shapovalov_symmetric,
    sum_vanishes,
)
from .sl2_rep import WeightDatum, block_dimension, dim_sing_formula, dim_sing_kernel, multiplicity_trivial
from .slp_extension import (
    BlockTooLarge,
    ReductionFailed,
    SlpProblem,
    exponents,
    fuchsian_instance,
    fuchsian_reduce,
    level_distance,
    plane_from_slp_orbit,
    slp_dim_sing,
    slp_orbit_from_plane,
    solve_slp,
)
from .wronski_map import (
    DegeneratePlane,
    PolyPlane,
    ResidueObstruction,
    orbit_from_plane,
    plane_distance,
    plane_from_orbit,
    plane_wronskian,
)

SCHEMA = 1
EIGEN_TOL = 1e-8
ROUNDTRIP_TOL = 1e-8


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    tol: float = 1e-10
    max_starts: int | None = None
    output: str = "json"
    exhaustive: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed must be a 64-bit unsigned integer")
        if self.max_starts is not None and self.max_starts < 1:
            raise UsageError("--max-starts must be positive")

    def solver(self) -> SolverConfig:
        return SolverConfig(tol=self.tol, seed=self.seed, max_starts=self.max_starts, exhaustive=self.exhaustive)

    def rng(self, *salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, *salt])


# ---- argument parsing ---------------------------------------------------

def _int_list(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _scalar(text: str):
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        pass
    try:
        return complex(text.replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse point {text!r}")


def _scalar_list(text: str) -> tuple:
    return tuple(_scalar(x) for x in text.split(",") if x.strip())


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--max-starts", type=int, default=None)
    common.add_argument("--output", choices=("json", "csv", "pretty"), default="json")
    common.add_argument("--exhaustive", action="store_true")

    parser = _Parser(prog="bethewronski", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help_text, *flags):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        for flag in flags:
            spec = {
                "M": dict(type=_int_list, required=True, help="highest weights m_1,...,m_n"),
                "z": dict(type=_scalar_list, help="marked points (rationals p/q or complex a+bj)"),
                "k": dict(type=int, required=True),
                "klist": dict(type=_int_list, required=True, help="level counts k_1,...,k_(p-1)"),
                "q": dict(type=_int_list, required=True, help="Schubert indices q_1,...,q_r"),
                "d": dict(type=int, required=True),
                "p": dict(type=int, default=2),
                "p3": dict(type=int, default=3),
            }[flag]
            dest = {"klist": "k", "p3": "p"}.get(flag, flag)
            sp.add_argument(f"--{dest}", dest=dest, **spec)
        return sp

    cmd("dim-sing", "dimension of Sing_k by formula and by exact kernel", "M", "k")
    cmd("schubert", "intersection numbers by Pieri, closed formula and sl_2 multiplicity", "q", "d", "p")
    cmd("gaudin-verify", "exact algebraic checks of the Gaudin Hamiltonians on one weight block", "M", "z", "k")
    cmd("bethe-solve", "solve the Bethe system and verify the Bethe vectors", "M", "z", "k")
    w = cmd("wronski", "Bethe orbits as planes of polynomials", "M", "z", "k")
    w.add_argument("--verify-correspondence", action="store_true")
    cmd("slp-solve", "solve the leveled sl_p system", "M", "z", "klist", "p3")
    cmd("slp-dim", "sl_p singular-vector dimension against the Schubert bound", "M", "klist", "p3")
    cmd("fuchsian-check", "reduce the ODE of an exact two-point plane and read off its exponents", "M", "k", "p3")
    va = sub.add_parser("verify-all", parents=[common], help="run the desk-scale acceptance sweep")
    va.add_argument("--level", choices=("desk",), default="desk")
    va.add_argument("--quick", action="store_true", help="skip the exhaustive pass")
    return parser


# ---- serialization ------------------------------------------------------

def jsonable(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Rational):
        return pc.scalar_to_json(Fraction(obj))
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return pc.scalar_to_json(complex(obj))
    if isinstance(obj, (pc.Poly, PolyPlane)):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and any(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, json.dumps(obj) if isinstance(obj, list) else obj


def render(report: dict, fmt: str) -> str:
    data = jsonable(report)
    if fmt == "json":
        return json.dumps(data, separators=(",", ":"))
    rows = list(_flatten(data))
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key, value in rows:
            writer.writerow([key, "" if value is None else (json.dumps(value) if isinstance(value, bool) else value)])
        return buf.getvalue().rstrip("\n")
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {json.dumps(v) if isinstance(v, (bool, type(None))) else v}" for k, v in rows)


# ---- subcommands --------------------------------------------------------

def _points(args, cfg: RunConfig, n: int, salt: int) -> tuple:
    if args.z is None:
        return generic_points(n, cfg.rng(salt))
    if len(args.z) != n:
        raise UsageError(f"--z has {len(args.z)} points but --M has {n} weights")
    if len(set(args.z)) != n:
        raise UsageError("marked points must be pairwise distinct")
    return args.z


def _weight_datum(M, k) -> WeightDatum:
    if 2 * k > sum(M):
        raise UsageError(f"k exceeds |M|/2 (k={k}, |M|={sum(M)})")
    try:
        return WeightDatum(M, k)
    except ValueError as exc:
        raise UsageError(str(exc))


def cmd_dim_sing(args, cfg):
    wd = _weight_datum(args.M, args.k)
    kernel = dim_sing_kernel(wd)
    try:
        formula = dim_sing_formula(wd)
    except NTooSmall:
        formula = None
    mult = multiplicity_trivial(list(wd.M) + [wd.total - 2 * wd.k])
    agree = (formula is None or formula == kernel) and kernel == mult
    return {"formula": formula, "kernel": kernel, "agree": agree}, agree


def cmd_schubert(args, cfg):
    qs, d, p = args.q, args.d, args.p
    if not 1 <= p <= d:
        raise UsageError(f"need 1 <= p <= d, got p={p}, d={d}")
    if any(q < 0 for q in qs):
        raise UsageError("Schubert indices must be nonnegative")
    box = (p, d + 1 - p)
    try:
        pieri = sch.intersection_number(qs, box)
    except sch.CodimensionMismatch as exc:
        raise UsageError(str(exc))
    formula = rep = None
    if p == 2:
        rep = multiplicity_trivial(qs)
        try:
            formula = sch.intersection_number_formula(qs, d)
        except (NTooSmall, sch.HypothesisViolated):
            formula = None
    agree = all(v == pieri for v in (formula, rep) if v is not None)
    return {"pieri": pieri, "formula": formula, "rep_oracle": rep}, agree


def cmd_gaudin_verify(args, cfg):
    wd = _weight_datum(args.M, args.k)
    z = _points(args, cfg, wd.n, 3)
    try:
        ks = [k for k in (wd.k - 1, wd.k, wd.k + 1) if 0 <= k <= wd.total]
        system = build_hamiltonians(wd.M, z, ks)
    except CoincidingPoints as exc:
        raise UsageError(str(exc))
    comm = commutators_vanish(system, wd.k)
    checks = {
        "commutators_zero": all(v == 0 for v in comm.values()),
        "sum_zero": sum_vanishes(system, wd.k),
        "shapovalov_symmetric": shapovalov_symmetric(system, wd.k),
        "commutes_with_sl2": commutes_with_sl2(system, wd.k),
        "preserves_sing": preserves_sing(system, wd.k),
    }
    report = {
        "M": wd.M,
        "z": z,
        "k": wd.k,
        "block_dimensions": {str(k): block_dimension(wd.M, k) for k in ks},
        "commutator_norms": {f"{i},{j}": v for (i, j), v in comm.items()},
        **checks,
    }
    ok = all(checks.values())
    return report, ok


def _solve(args, cfg) -> tuple:
    wd = _weight_datum(args.M, args.k)
    z = _points(args, cfg, wd.n, 1)
    p = MasterProblem(wd.M, z, wd.k)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SolverWarning)
        res = solve_orbits(p, cfg.solver())
    return p, res


def _count_verdict(res) -> dict:
    if len(res.orbits) > res.expected:
        return {"verdict": "parasite", "excess": len(res.orbits) - res.expected}
    if len(res.orbits) < res.expected:
        return {"verdict": "missing", "missing": res.expected - len(res.orbits)}
    return {"verdict": "complete"}


def cmd_bethe_solve(args, cfg):
    p, res = _solve(args, cfg)
    system = build_hamiltonians(p.M, [complex(x) for x in p.z], [p.k]) if p.k else None
    orbits = []
    for o in res.orbits:
        lam = bethe_eigenvalues(p, o)
        entry = {"t": o.t, "residual": o.residual, "hessian_min_sv": o.hessian_min_sv,
                 "hessian_relative_sv": o.hessian_relative_sv, "eigenvalues": lam}
        if system is not None:
            w = bethe_vector(p, o)
            entry["eigen_residual"] = eigen_residual(system, w, lam)
            entry["singular_defect"] = singular_defect(w)
        else:
            entry["eigen_residual"] = 0.0
            entry["singular_defect"] = 0.0
        orbits.append(entry)
    eigen_ok = all(e["eigen_residual"] < EIGEN_TOL for e in orbits)
    report = {
        "M": p.M, "z": p.z, "k": p.k,
        "dim_sing": res.expected,
        "orbit_count": len(res.orbits),
        "agree": res.agree,
        **_count_verdict(res),
        "starts_used": res.starts_used,
        "budget": res.budget,
        "exhaustive": cfg.exhaustive,
        "orbits": orbits,
    }
    return report, res.agree and eigen_ok


def cmd_wronski(args, cfg):
    p, res = _solve(args, cfg)
    W = p.wronskian_target(pc.COMPLEX)
    entries, ok = [], res.agree
    for o in res.orbits:
        entry = {"t": o.t}
        try:
            V = plane_from_orbit(p, o)
        except ResidueObstruction as exc:
            entries.append({**entry, "error": str(exc)})
            ok = False
            continue
        entry["plane"] = V
        entry["wronskian_error"] = pc.rel_distance(plane_wronskian(V).monic(), W.monic())
        if args.verify_correspondence:
            try:
                back = orbit_from_plane(V, p)
                V2 = plane_from_orbit(p, back)
            except (DegeneratePlane, ResidueObstruction) as exc:
                entries.append({**entry, "error": str(exc)})
                ok = False
                continue
            entry["orbit_roundtrip"] = multiset_distance(o.t, back.t) / p.scale()
            entry["plane_roundtrip"] = plane_distance(V, V2)
            ok = ok and max(entry["orbit_roundtrip"], entry["plane_roundtrip"]) < ROUNDTRIP_TOL
        ok = ok and entry["wronskian_error"] < ROUNDTRIP_TOL
        entries.append(entry)
    report = {"M": p.M, "z": p.z, "k": p.k, "dim_sing": res.expected, "orbit_count": len(res.orbits),
              "agree": res.agree, **_count_verdict(res), "orbits": entries}
    return report, ok


def _slp_problem(args, z) -> SlpProblem:
    try:
        return SlpProblem(args.p, args.M, z, args.k)
    except CoincidingPoints as exc:
        raise UsageError(str(exc))
    except ValueError as exc:
        raise UsageError(str(exc))


def _slp_bound(p: SlpProblem):
    try:
        return sch.slp_upper_bound(p.M, p.k, p=p.p)
    except sch.InvalidWeight:
        return None


def _slp_dim(p: SlpProblem) -> int:
    try:
        return slp_dim_sing(p)
    except BlockTooLarge as exc:
        raise UsageError(str(exc))


def cmd_slp_dim(args, cfg):
    p = _slp_problem(args, tuple(range(len(args.M))))
    dim = _slp_dim(p)
    bound = _slp_bound(p)
    dominant = sweeps.dominant(p.k, p.total)
    agree = bound == dim if dominant else True
    return {"p": p.p, "M": p.M, "k": p.k, "kernel": dim, "upper_bound": bound, "dominant": dominant,
            "agree": agree}, agree


def cmd_slp_solve(args, cfg):
    z = _points(args, cfg, len(args.M), 2)
    p = _slp_problem(args, z)
    dim = _slp_dim(p)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SolverWarning)
        res = solve_slp(p, cfg.solver(), expected=dim)
    orbits, ok = [], res.agree
    for o in res.orbits:
        entry = {"levels": o.levels, "residual": o.residual, "hessian_min_sv": o.hessian_min_sv,
                 "hessian_relative_sv": o.hessian_relative_sv}
        try:
            V = plane_from_slp_orbit(p, o)
            entry["plane"] = V
            entry["roundtrip"] = level_distance(o, slp_orbit_from_plane(V, p))
        except Exception as exc:  # reconstruction is a diagnostic, not the verdict
            entry["plane_error"] = str(exc)
        orbits.append(entry)
    report = {"p": p.p, "M": p.M, "z": p.z, "k": p.k, "degrees": p.degrees(), "dim_sing": dim,
              "upper_bound": _slp_bound(p), "orbit_count": len(res.orbits), "agree": res.agree,
              **_count_verdict(res), "starts_used": res.starts_used, "orbits": orbits}
    return report, ok


def cmd_fuchsian_check(args, cfg):
    if len(args.M) != 2:
        raise UsageError("fuchsian-check needs exactly two weights (points 0 and 1)")
    if args.p < 2:
        raise UsageError("p must be at least 2")
    m1, m2 = args.M
    if not 0 <= args.k <= min(m1, m2):
        raise UsageError(f"an exact plane exists only for 0 <= k <= min(m1, m2) = {min(m1, m2)}")
    V = fuchsian_instance(args.p, m1, m2, args.k)
    if V is None:
        return {"p": args.p, "M": args.M, "k": args.k, "error": "no exact plane"}, False
    want0 = sorted(list(range(args.p - 1)) + [m1 + args.p - 1])
    want1 = sorted(list(range(args.p - 1)) + [m2 + args.p - 1])
    report = {"p": args.p, "M": args.M, "k": args.k, "plane": V,
              "expected_exponents": {"0": want0, "1": want1}}
    try:
        form = fuchsian_reduce(V)
        e0, e1 = exponents(form, 0), exponents(form, 1)
    except ReductionFailed as exc:
        report["error"] = str(exc)
        return report, False
    report.update({"A": form.A, "B": form.B, "C": form.C, "coefficients": form.coefficients,
                   "lower_coefficients_zero": True, "exponents": {"0": e0, "1": e1}})
    ok = e0 == want0 and e1 == want1
    report["agree"] = ok
    return report, ok


def cmd_verify_all(args, cfg):
    reports = sweeps.run_all(seed=cfg.seed, exhaustive=not args.quick)
    for r in reports:
        print(f"{r.line()}", file=sys.stderr)
    crit = [{"criterion": i + 1, "name": r.name, "passed": r.passed, "cases": r.cases,
             "details": r.details, "failures": r.failures[:5]} for i, r in enumerate(reports)]
    ok = all(r.passed for r in reports)
    return {"level": args.level, "seed": cfg.seed, "passed": ok, "criteria": crit}, ok


COMMANDS = {
    "dim-sing": cmd_dim_sing,
    "schubert": cmd_schubert,
    "gaudin-verify": cmd_gaudin_verify,
    "bethe-solve": cmd_bethe_solve,
    "wronski": cmd_wronski,
    "slp-solve": cmd_slp_solve,
    "slp-dim": cmd_slp_dim,
    "fuchsian-check": cmd_fuchsian_check,
    "verify-all": cmd_verify_all,
}


def run(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        cfg = RunConfig(seed=args.seed, tol=args.tol, max_starts=args.max_starts, output=args.output,
                        exhaustive=args.exhaustive)
        t0 = time.time()
        report, ok = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = {"schema": SCHEMA, **report}
    print(render(report, cfg.output), file=out)
    if args.command == "verify-all":
        print(f"total {time.time() - t0:.1f}s", file=sys.stderr)
    if not ok:
        print(f"{args.command}: check failed (see report)", file=sys.stderr)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
