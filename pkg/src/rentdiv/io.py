"""JSON encoding of instances, solutions, games and strategy profiles.

Every rational is written as a ``"p/q"`` (or integer) string.  Readers reject
JSON floats so no value ever passes through binary floating point.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Optional

from .errors import ValidationError
from .model import RentInstance, Solution, as_rational, validate_instance
from .reductions import PolymatrixGame, StrategyProfile


def q(x) -> str:
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return str(Fraction(x))


def _reject_floats(text: str):
    def bad(value):
        raise ValidationError("", f"float literal {value} is not exact; use a 'p/q' string")

    return json.loads(text, parse_float=bad)


def loads(text: str):
    try:
        return _reject_floats(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("", f"invalid JSON: {exc.msg} at line {exc.lineno}") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def utility_to_json(u) -> dict:
    out = {"base": q(u.base), "breakpoints": [q(b) for b in u.breakpoints], "slopes": [q(s) for s in u.slopes]}
    if u.left_slope is not None:
        out["left_slope"] = q(u.left_slope)
    return out


def instance_to_json(inst: RentInstance) -> dict:
    out = {"n": inst.n, "utilities": [[utility_to_json(u) for u in row] for row in inst.utilities]}
    if inst.structured_epsilon is not None:
        out["epsilon"] = q(inst.structured_epsilon)
    return out


def instance_from_json(raw, require_nonnegative_base: bool = True) -> RentInstance:
    return validate_instance(raw, require_nonnegative_base)


def solution_to_json(s: Solution, certificate: Optional[dict] = None) -> dict:
    out = {"allocation": list(s.allocation), "prices": [q(p) for p in s.prices]}
    if certificate is not None:
        out["certificate"] = certificate
    return out


def solution_from_json(raw, n: Optional[int] = None) -> Solution:
    if not isinstance(raw, dict):
        raise ValidationError("", "solution must be a JSON object")
    for key in ("allocation", "prices"):
        if key not in raw:
            raise ValidationError(key, "missing")
    alloc = raw["allocation"]
    if not isinstance(alloc, list) or any(not isinstance(r, int) or isinstance(r, bool) for r in alloc):
        raise ValidationError("allocation", "must be a list of room indices")
    prices = tuple(as_rational(p, f"prices[{i}]") for i, p in enumerate(raw["prices"]))
    if n is not None and (len(alloc) != n or len(prices) != n):
        raise ValidationError("allocation", f"expected {n} agents and {n} prices")
    try:
        return Solution(tuple(alloc), prices)
    except ValueError as exc:
        raise ValidationError("allocation", str(exc)) from None


def _matrix_to_json(m) -> list:
    return [[q(v) for v in row] for row in m]


def _matrix_from_json(raw, path: str) -> tuple:
    if not isinstance(raw, list):
        raise ValidationError(path, "expected a matrix")
    return tuple(tuple(as_rational(v, f"{path}[{i}][{j}]") for j, v in enumerate(row)) for i, row in enumerate(raw))


def game_to_json(g: PolymatrixGame) -> dict:
    return {
        "n": g.n,
        "M": q(g.M),
        "gamma": q(g.gamma),
        "eta": q(g.eta),
        "P": [_matrix_to_json(m) for m in g.P],
        "Q": [_matrix_to_json(m) for m in g.Q],
    }


def game_from_json(raw) -> PolymatrixGame:
    if not isinstance(raw, dict):
        raise ValidationError("", "game must be a JSON object")
    for key in ("n", "M", "gamma", "eta", "P", "Q"):
        if key not in raw:
            raise ValidationError(key, "missing")
    n = raw["n"]
    if not isinstance(n, int) or n < 1:
        raise ValidationError("n", "must be a positive integer")
    P = tuple(_matrix_from_json(m, f"P[{i}]") for i, m in enumerate(raw["P"]))
    Q = tuple(_matrix_from_json(m, f"Q[{i}]") for i, m in enumerate(raw["Q"]))
    for name, ms in (("P", P), ("Q", Q)):
        if len(ms) != n + 1 or any(len(m) != n + 1 or any(len(row) != n + 1 for row in m) for m in ms):
            raise ValidationError(name, f"expected {n + 1} matrices of size {n + 1} x {n + 1}")
    return PolymatrixGame(n, as_rational(raw["M"], "M"), as_rational(raw["gamma"], "gamma"),
                          as_rational(raw["eta"], "eta"), P, Q)


def profile_to_json(p: StrategyProfile) -> dict:
    return {"strategies": [[q(v) for v in x] for x in p.strategies]}


def profile_from_json(raw) -> StrategyProfile:
    if not isinstance(raw, dict) or not isinstance(raw.get("strategies"), list):
        raise ValidationError("strategies", "expected an object with a 'strategies' list")
    return StrategyProfile(tuple(
        tuple(as_rational(v, f"strategies[{i}][{j}]") for j, v in enumerate(x)) for i, x in enumerate(raw["strategies"])
    ))
