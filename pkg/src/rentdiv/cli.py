"""``rentdiv`` command line.

Results go to stdout as JSON (CSV for ``bench``); failures print a JSON error
object on stderr and exit with 2 (bad input), 3 (infeasible or guarded) or
4 (internal invariant broken).
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from fractions import Fraction
from typing import Optional

from . import io as jio
from .errors import (
    GuardExceeded,
    InvalidProfile,
    InvariantViolation,
    IterationLimitExceeded,
    NoPerfectMatching,
    NotDoublyStochastic,
    PreconditionViolated,
    ValidationError,
)
from .generators import FAMILIES, random_instance
from .model import RentInstance, Solution, as_rational, check_ef, check_eps_ef
from .optimal import compute_partition, optimal_solve
from .oracle import enumerate_ef, minimal_price
from .reductions import (
    LinearInstance,
    build_game,
    check_claims,
    ef_to_candidate,
    extract_ef,
    linear_instance_of,
    reduce_piecewise_to_linear,
    verify_ne,
)
from .rounding import certify_transfer, round_instance
from .solver import SolveMode, check_nonneg_precondition, check_nonneg_utilities, solve

EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_INVARIANT = 4

_EXIT_CODES = [
    (ValidationError, EXIT_VALIDATION),
    (InvalidProfile, EXIT_VALIDATION),
    (GuardExceeded, EXIT_INFEASIBLE),
    (PreconditionViolated, EXIT_INFEASIBLE),
    (NoPerfectMatching, EXIT_INFEASIBLE),
    (NotDoublyStochastic, EXIT_INFEASIBLE),
    (InvariantViolation, EXIT_INVARIANT),
    (IterationLimitExceeded, EXIT_INVARIANT),
]


class _Parser(argparse.ArgumentParser):
    """Usage errors are reported as JSON like every other failure."""

    def error(self, message):
        sys.exit(_fail("UsageError", message, EXIT_VALIDATION))


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(path, f"cannot read file: {exc.strerror}") from None
    return jio.loads(text)


def _load_instance(path: str) -> RentInstance:
    return jio.instance_from_json(_read_json(path))


def _rational_arg(value: Optional[str], name: str) -> Optional[Fraction]:
    return None if value is None else as_rational(value, name)


def _positive_eps(value: Optional[str]) -> Optional[Fraction]:
    eps = _rational_arg(value, "epsilon")
    if eps is not None and eps <= 0:
        raise ValidationError("epsilon", "must be positive")
    return eps


def verification_block(inst: RentInstance, s: Solution, eps: Optional[Fraction] = None) -> dict:
    """Checks recomputed from the instance and the final solution alone."""
    rep = check_ef(inst, s)
    out = {
        "envy_free": rep.ok,
        "violations": [{"agent": v.agent, "room": v.room, "gap": jio.q(v.gap)} for v in rep.violations],
        "utilities": [jio.q(u) for u in s.utilities(inst)],
        "total_price": jio.q(sum(s.prices)),
        "zero_price_rooms": [r for r, p in enumerate(s.prices) if p == 0],
    }
    if eps is not None:
        erep = check_eps_ef(inst, s, eps)
        out["epsilon"] = jio.q(eps)
        out["eps_envy_free"] = erep.ok
        out["eps_violations"] = [
            {"agent": v.agent, "room": v.room, "gap": jio.q(v.gap)} for v in erep.violations
        ]
    return out


def _emit(obj) -> None:
    sys.stdout.write(jio.dumps(obj))


def cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    eps = _positive_eps(args.epsilon)
    C = _rational_arg(args.total_rent, "total_rent")
    if args.nonneg_utilities and C is None:
        raise ValidationError("nonneg-utilities", "requires --total-rent")
    work, rounded = inst, False
    if eps is not None and not inst.structured:
        work, rounded = round_instance(inst, eps), True
    elif eps is None and inst.structured:
        eps = inst.structured_epsilon
    mode = SolveMode() if C is None else SolveMode.fixed_rent(C)
    if args.nonneg_utilities:
        check_nonneg_precondition(inst, C)
    s, trace = solve(work, mode)
    if args.nonneg_utilities:
        check_nonneg_utilities(inst, s)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8", newline="") as fh:
            fh.write(trace.to_csv())
    cert = verification_block(inst, s, eps if rounded else None)
    cert["mode"] = mode.kind
    cert["iterations"] = trace.iterations
    cert["domain_changes"] = trace.domain_changes
    if rounded:
        cr = certify_transfer(inst, work, s, eps)
        cert["rounded"] = True
        cert["transfer_ok"] = cr.ok
        cert["dominance_failures"] = len(cr.dominance_failures)
        cert["sign_failures"] = len(cr.sign_failures)
    _emit(jio.solution_to_json(s, cert))
    return 0


def cmd_optimal(args) -> int:
    inst = _load_instance(args.instance)
    eps = _positive_eps(args.epsilon)
    work = inst
    if eps is not None and not inst.structured:
        work = round_instance(inst, eps)
    s = optimal_solve(work)
    cert = verification_block(inst, s, eps if work is not inst else None)
    part = compute_partition(work, s)
    cert["unreached_rooms"] = sorted(part.Ec)
    _emit(jio.solution_to_json(s, cert))
    return 0


def cmd_round(args) -> int:
    inst = _load_instance(args.instance)
    eps = _positive_eps(args.epsilon)
    _emit(jio.instance_to_json(round_instance(inst, eps)))
    return 0


def cmd_verify(args) -> int:
    inst = _load_instance(args.instance)
    s = jio.solution_from_json(_read_json(args.solution), inst.n)
    eps = _positive_eps(args.epsilon)
    block = verification_block(inst, s, eps)
    block["ok"] = block["eps_envy_free"] if eps is not None else block["envy_free"]
    _emit(block)
    return 0


def cmd_oracle(args) -> int:
    inst = _load_instance(args.instance)
    C = _rational_arg(args.total_rent, "total_rent")
    cells = enumerate_ef(inst, C)
    out = {
        "cells": [
            {
                "allocation": list(c.allocation),
                "lower": [jio.q(x) for x in c.lower],
                "upper": [jio.q(x) for x in c.upper],
                "min_sum_prices": [jio.q(x) for x in c.min_sum],
            }
            for c in cells
        ]
    }
    if C is None:
        out["minimal_price"] = [jio.q(x) for x in minimal_price(inst)]
    else:
        out["total_rent"] = jio.q(C)
    _emit(out)
    return 0


def cmd_game_build(args) -> int:
    inst = _load_instance(args.instance)
    try:
        lin, K = LinearInstance.from_rent_instance(inst), Fraction(0)
    except ValueError:
        lin, K = reduce_piecewise_to_linear(inst)
    out = jio.game_to_json(build_game(lin))
    out["shift"] = jio.q(K)
    _emit(out)
    return 0


def _load_game(path: str):
    raw = _read_json(path)
    shift = as_rational(raw.get("shift", "0"), "shift") if isinstance(raw, dict) else Fraction(0)
    return jio.game_from_json(raw), shift


def cmd_game_verify(args) -> int:
    g, _ = _load_game(args.game)
    prof = jio.profile_from_json(_read_json(args.profile))
    rep = verify_ne(g, prof)
    _emit({
        "equilibrium": rep.ok,
        "violations": [{"player": p, "action": a, "slack": jio.q(sl)} for p, a, sl in rep.violations],
        "claims": check_claims(g, prof),
    })
    return 0


def cmd_game_extract(args) -> int:
    g, shift = _load_game(args.game)
    prof = jio.profile_from_json(_read_json(args.profile))
    rep = verify_ne(g, prof)
    if not rep.ok:
        raise PreconditionViolated(f"profile is not an equilibrium ({len(rep.violations)} best-response violations)")
    lin = linear_instance_of(g)
    s = extract_ef(g, prof, lin)
    cert = verification_block(lin.to_rent_instance(), s)
    if shift:
        s = Solution(s.allocation, tuple(p + shift for p in s.prices))
        cert["shift"] = jio.q(shift)
    _emit(jio.solution_to_json(s, cert))
    return 0


def cmd_game_candidate(args) -> int:
    g, shift = _load_game(args.game)
    s = jio.solution_from_json(_read_json(args.solution), g.n)
    if shift:
        s = Solution(s.allocation, tuple(p - shift for p in s.prices))
    _emit(jio.profile_to_json(ef_to_candidate(g, s, linear_instance_of(g))))
    return 0


def cmd_gen(args) -> int:
    eps = _positive_eps(args.structured)
    if args.agents < 1 or args.pieces < 1:
        raise ValidationError("agents", "--agents and --pieces must be positive")
    _emit(jio.instance_to_json(random_instance(args.agents, args.pieces, args.seed, epsilon=eps)))
    return 0


def _phi(pot) -> str:
    if pot is None:
        return ""
    v = pot.value
    return str(v) if v is not None else f"{pot.phi1}:{pot.product}"


def cmd_bench(args) -> int:
    if args.family not in FAMILIES:
        raise ValidationError("family", f"unknown family {args.family!r}; choose from {sorted(FAMILIES)}")
    make = FAMILIES[args.family]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["family", "size", "seed", "n", "pieces", "iterations", "domain_changes",
                "max_per_domain", "wall_time_s", "potential_trajectory"])
    for size in args.sizes:
        for rep in range(args.repeats):
            seed = args.seed + rep
            inst = make(size, seed)
            t0 = time.perf_counter()
            _, trace = solve(inst)
            elapsed = time.perf_counter() - t0
            per = trace.per_domain_counts()
            w.writerow([args.family, size, seed, inst.n, inst.total_pieces(), trace.iterations,
                        trace.domain_changes, max(per) if per else 0,
                        "" if args.no_timing else f"{elapsed:.6f}",
                        " ".join(_phi(st.potential) for st in trace.steps[1:])])
    sys.stdout.write(buf.getvalue())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rentdiv", description="Exact envy-free rent division.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="envy-free solution (zero-price or fixed total rent)")
    s.add_argument("instance")
    s.add_argument("--epsilon", help="round a general instance with this epsilon first")
    s.add_argument("--total-rent", help="prices must add up to this amount")
    s.add_argument("--nonneg-utilities", action="store_true", help="also require every utility to be >= 0")
    s.add_argument("--trace", help="write the iteration trace CSV here")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("optimal", help="componentwise-minimal envy-free prices")
    s.add_argument("instance")
    s.add_argument("--epsilon")
    s.set_defaults(func=cmd_optimal)

    s = sub.add_parser("round", help="round slopes to powers of 1+epsilon")
    s.add_argument("instance")
    s.add_argument("--epsilon", required=True)
    s.set_defaults(func=cmd_round)

    s = sub.add_parser("verify", help="check a solution for (epsilon-)envy-freeness")
    s.add_argument("instance")
    s.add_argument("solution")
    s.add_argument("--epsilon")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("oracle", help="brute-force enumeration for tiny instances")
    s.add_argument("instance")
    s.add_argument("--total-rent")
    s.set_defaults(func=cmd_oracle)

    g = sub.add_parser("game", help="polymatrix game reduction").add_subparsers(dest="game_command", required=True, parser_class=_Parser)
    s = g.add_parser("build", help="game JSON from an instance (piecewise instances are reduced first)")
    s.add_argument("instance")
    s.set_defaults(func=cmd_game_build)
    s = g.add_parser("verify", help="best-response check of a strategy profile")
    s.add_argument("game")
    s.add_argument("profile")
    s.set_defaults(func=cmd_game_verify)
    s = g.add_parser("extract", help="envy-free solution from an equilibrium profile")
    s.add_argument("game")
    s.add_argument("profile")
    s.set_defaults(func=cmd_game_extract)
    s = g.add_parser("candidate", help="strategy profile encoding an envy-free solution")
    s.add_argument("game")
    s.add_argument("solution")
    s.set_defaults(func=cmd_game_candidate)

    s = sub.add_parser("gen", help="random instance, deterministic in the seed")
    s.add_argument("--agents", type=int, required=True)
    s.add_argument("--pieces", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--structured", metavar="E", help="make slopes powers of 1+E")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("bench", help="iteration statistics over a generator family")
    s.add_argument("--family", required=True)
    s.add_argument("--sizes", type=int, nargs="+", required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--repeats", type=int, default=1)
    s.add_argument("--no-timing", action="store_true", help="leave wall time blank so output is reproducible")
    s.set_defaults(func=cmd_bench)
    return p


def _fail(kind: str, message: str, code: int, path: Optional[str] = None) -> int:
    err = {"error": kind, "message": message, "exit_code": code}
    if path:
        err["path"] = path
    sys.stderr.write(jio.dumps(err))
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # map library errors onto exit codes
        for cls, code in _EXIT_CODES:
            if isinstance(exc, cls):
                return _fail(type(exc).__name__, str(exc), code, getattr(exc, "path", None))
        if isinstance(exc, (ValueError, OSError)):
            return _fail(type(exc).__name__, str(exc), EXIT_VALIDATION)
        return _fail(type(exc).__name__, str(exc), EXIT_INVARIANT)


if __name__ == "__main__":
    sys.exit(main())
