"""Domain types for rent division with piecewise-linear utilities.

Every scalar is a :class:`fractions.Fraction`.  Floats are refused at the
boundary so that no rounding ever enters the pipeline.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import ValidationError

Rational = Fraction
INF = math.inf


def as_rational(value, path: str = "") -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings; floats are rejected."""
    if isinstance(value, bool):
        raise ValidationError(path, f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValidationError(path, f"not a rational: {value!r}") from None
    raise ValidationError(path, f"floats and {type(value).__name__} values are not exact; use 'p/q' strings")


def exponent_of(slope: Fraction, epsilon: Fraction) -> Optional[int]:
    """Return k with slope == (1+epsilon)**k, or None if no such integer exists."""
    base = 1 + epsilon
    k, x = 0, Fraction(1)
    if slope >= 1:
        while x < slope:
            x *= base
            k += 1
    else:
        while x > slope:
            x /= base
            k -= 1
    return k if x == slope else None


def ceil_exponent(slope: Fraction, epsilon: Fraction) -> int:
    """Smallest k with (1+epsilon)**k >= slope, found by exact repeated products."""
    base = 1 + epsilon
    k, x = 0, Fraction(1)
    if slope > 1:
        while x < slope:
            x *= base
            k += 1
    else:
        while x / base >= slope:
            x /= base
            k -= 1
    return k


def floor_exponent(slope: Fraction, epsilon: Fraction) -> int:
    """Largest k with (1+epsilon)**k <= slope."""
    k = ceil_exponent(slope, epsilon)
    return k if (1 + epsilon) ** k == slope else k - 1


@dataclass(frozen=True)
class PiecewiseLinearUtility:
    """Continuous, strictly decreasing, piecewise-linear utility of one agent for one room.

    ``slopes[i]`` is the slope magnitude on ``[breakpoints[i], breakpoints[i+1]]``;
    the last piece is unbounded.  Prices below zero use ``left_slope``, which
    defaults to the first slope (the first piece extended leftward).
    """

    base: Fraction
    breakpoints: tuple
    slopes: tuple
    exponents: Optional[tuple] = None
    left_slope: Optional[Fraction] = None
    left_exponent: Optional[int] = None
    _values: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "base", as_rational(self.base, "base"))
        bps = tuple(as_rational(b, f"breakpoints[{i}]") for i, b in enumerate(self.breakpoints))
        lams = tuple(as_rational(s, f"slopes[{i}]") for i, s in enumerate(self.slopes))
        if not bps or bps[0] != 0:
            raise ValidationError("breakpoints", "first breakpoint must be 0")
        if any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise ValidationError("breakpoints", "breakpoints must be strictly increasing")
        if len(lams) != len(bps):
            raise ValidationError("slopes", "need exactly one slope per breakpoint")
        for i, s in enumerate(lams):
            if s <= 0:
                raise ValidationError(f"slopes[{i}]", "monotone decreasing violated: slope magnitude must be > 0")
        set_(self, "breakpoints", bps)
        set_(self, "slopes", lams)
        if self.left_slope is not None:
            ls = as_rational(self.left_slope, "left_slope")
            if ls <= 0:
                raise ValidationError("left_slope", "monotone decreasing violated: slope magnitude must be > 0")
            set_(self, "left_slope", None if ls == lams[0] else ls)
            if self.left_slope is None:
                set_(self, "left_exponent", None)
        if self.exponents is not None:
            set_(self, "exponents", tuple(int(k) for k in self.exponents))
            if len(self.exponents) != len(lams):
                raise ValidationError("exponents", "need exactly one exponent per slope")
        values = [self.base]
        for i in range(1, len(bps)):
            values.append(values[-1] - lams[i - 1] * (bps[i] - bps[i - 1]))
        set_(self, "_values", tuple(values))

    # construction helpers -------------------------------------------------

    @classmethod
    def linear(cls, base, slope) -> "PiecewiseLinearUtility":
        return cls(base, (0,), (slope,))

    @classmethod
    def quasilinear(cls, base) -> "PiecewiseLinearUtility":
        return cls(base, (0,), (1,))

    # queries ---------------------------------------------------------------

    @property
    def pieces(self) -> int:
        return len(self.breakpoints)

    @property
    def leftward_slope(self) -> Fraction:
        return self.left_slope if self.left_slope is not None else self.slopes[0]

    @property
    def leftward_exponent(self) -> Optional[int]:
        if self.left_slope is not None:
            return self.left_exponent
        return None if self.exponents is None else self.exponents[0]

    def value_at_breakpoints(self) -> tuple:
        return self._values

    def __call__(self, x) -> Fraction:
        return evaluate(self, x)

    def slope_left_of(self, x) -> Fraction:
        """Slope magnitude on the piece immediately to the left of ``x`` (left derivative)."""
        i = bisect_left(self.breakpoints, x) - 1
        return self.leftward_slope if i < 0 else self.slopes[i]

    def exponent_left_of(self, x) -> Optional[int]:
        i = bisect_left(self.breakpoints, x) - 1
        if i < 0:
            return self.leftward_exponent
        return None if self.exponents is None else self.exponents[i]

    def all_slopes(self) -> list:
        out = list(self.slopes)
        if self.left_slope is not None:
            out.append(self.left_slope)
        return out

    def with_exponents(self, epsilon: Fraction) -> "PiecewiseLinearUtility":
        """Attach exponents; raises ValidationError when a slope is not a power of 1+epsilon."""
        ks = []
        for i, s in enumerate(self.slopes):
            k = exponent_of(s, epsilon)
            if k is None:
                raise ValidationError(f"slopes[{i}]", f"{s} is not a power of (1+eps) = {1 + epsilon}")
            ks.append(k)
        lk = None
        if self.left_slope is not None:
            lk = exponent_of(self.left_slope, epsilon)
            if lk is None:
                raise ValidationError("left_slope", f"{self.left_slope} is not a power of (1+eps) = {1 + epsilon}")
        return PiecewiseLinearUtility(self.base, self.breakpoints, self.slopes, tuple(ks), self.left_slope, lk)

    def normalized(self) -> "PiecewiseLinearUtility":
        """Merge adjacent pieces that share a slope."""
        bps, lams, ks = [self.breakpoints[0]], [self.slopes[0]], []
        if self.exponents is not None:
            ks.append(self.exponents[0])
        for i in range(1, len(self.breakpoints)):
            if self.slopes[i] == lams[-1]:
                continue
            bps.append(self.breakpoints[i])
            lams.append(self.slopes[i])
            if self.exponents is not None:
                ks.append(self.exponents[i])
        return PiecewiseLinearUtility(
            self.base, tuple(bps), tuple(lams), tuple(ks) if self.exponents is not None else None,
            self.left_slope, self.left_exponent,
        )


def evaluate(u: PiecewiseLinearUtility, x) -> Fraction:
    """Utility at price ``x`` (exact)."""
    x = as_rational(x)
    if x < 0:
        return u.base - u.leftward_slope * x
    i = bisect_right(u.breakpoints, x) - 1
    return u._values[i] - u.slopes[i] * (x - u.breakpoints[i])


def zero_crossing(u: PiecewiseLinearUtility) -> Fraction:
    """The unique price at which ``u`` is zero; negative when the base value is."""
    if u.base <= 0:
        return u.base / u.leftward_slope
    values = u._values
    for i in range(len(values) - 1):
        if values[i + 1] <= 0:
            return u.breakpoints[i] + values[i] / u.slopes[i]
    return u.breakpoints[-1] + values[-1] / u.slopes[-1]


@dataclass(frozen=True)
class RentInstance:
    """``utilities[a][r]`` is agent a's utility curve for room r."""

    utilities: tuple
    structured_epsilon: Optional[Fraction] = None

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.utilities)
        n = len(rows)
        if n == 0:
            raise ValidationError("utilities", "instance must have at least one agent")
        for a, row in enumerate(rows):
            if len(row) != n:
                raise ValidationError(f"utilities[{a}]", f"table is not square: expected {n} rooms, got {len(row)}")
            for r, u in enumerate(row):
                if not isinstance(u, PiecewiseLinearUtility):
                    raise ValidationError(f"utilities[{a}][{r}]", "expected a PiecewiseLinearUtility")
        eps = self.structured_epsilon
        if eps is not None:
            eps = as_rational(eps, "epsilon")
            if eps <= 0:
                raise ValidationError("epsilon", "epsilon must be positive")
            fixed = []
            for a, row in enumerate(rows):
                out = []
                for r, u in enumerate(row):
                    try:
                        out.append(_checked_exponents(u, eps))
                    except ValidationError as exc:
                        raise ValidationError(f"utilities[{a}][{r}].{exc.path}", exc.reason) from None
                fixed.append(tuple(out))
            rows = tuple(fixed)
        object.__setattr__(self, "utilities", rows)
        object.__setattr__(self, "structured_epsilon", eps)

    @property
    def n(self) -> int:
        return len(self.utilities)

    @property
    def structured(self) -> bool:
        return self.structured_epsilon is not None

    def value(self, agent: int, room: int, price) -> Fraction:
        return evaluate(self.utilities[agent][room], price)

    def base_values(self) -> list:
        return [[u.base for u in row] for row in self.utilities]

    def total_pieces(self) -> int:
        return sum(u.pieces for row in self.utilities for u in row)

    def room_breakpoints(self, room: int, agents: Optional[Iterable[int]] = None) -> list:
        agents = range(self.n) if agents is None else agents
        return sorted({b for a in agents for b in self.utilities[a][room].breakpoints})

    def with_row(self, agent: int, row: Sequence[PiecewiseLinearUtility]) -> "RentInstance":
        rows = list(self.utilities)
        rows[agent] = tuple(row)
        return RentInstance(tuple(rows), self.structured_epsilon)

    @classmethod
    def from_functions(cls, table, epsilon=None) -> "RentInstance":
        """Build from nested ``(base, breakpoints, slopes)`` triples or bare ``(base, slope)`` pairs."""
        rows = []
        for row in table:
            out = []
            for spec in row:
                if isinstance(spec, PiecewiseLinearUtility):
                    out.append(spec)
                elif len(spec) == 2:
                    out.append(PiecewiseLinearUtility.linear(*spec))
                else:
                    out.append(PiecewiseLinearUtility(*spec))
            rows.append(tuple(out))
        return cls(tuple(rows), None if epsilon is None else as_rational(epsilon))

    @classmethod
    def quasilinear(cls, bases) -> "RentInstance":
        return cls(tuple(tuple(PiecewiseLinearUtility.quasilinear(b) for b in row) for row in bases))


def _checked_exponents(u: PiecewiseLinearUtility, eps: Fraction) -> PiecewiseLinearUtility:
    checked = u.with_exponents(eps)
    if u.exponents is not None and tuple(u.exponents) != checked.exponents:
        raise ValidationError("exponents", "stored exponents disagree with slopes")
    return checked


@dataclass(frozen=True)
class Solution:
    """Allocation (agent -> room) plus one price per room."""

    allocation: tuple
    prices: tuple

    def __post_init__(self):
        alloc = tuple(int(r) for r in self.allocation)
        prices = tuple(as_rational(p, f"prices[{i}]") for i, p in enumerate(self.prices))
        if sorted(alloc) != list(range(len(alloc))):
            raise ValidationError("allocation", f"not a bijection: {alloc}")
        if len(prices) != len(alloc):
            raise ValidationError("prices", "need one price per room")
        object.__setattr__(self, "allocation", alloc)
        object.__setattr__(self, "prices", prices)

    @property
    def n(self) -> int:
        return len(self.allocation)

    def utilities(self, inst: RentInstance) -> list:
        return [inst.value(a, r, self.prices[r]) for a, r in enumerate(self.allocation)]


@dataclass(frozen=True)
class LinearDomain:
    """Per-room half-open boxes ``lower < p <= upper``; bounds may be +-inf."""

    lower: tuple
    upper: tuple

    def contains(self, prices: Sequence) -> bool:
        return all(lo < p <= hi for lo, p, hi in zip(self.lower, prices, self.upper))


def linear_domain(inst: RentInstance, prices: Sequence, extra_breakpoints: Optional[Sequence] = None) -> LinearDomain:
    """Linear domain of ``prices``, pooling every agent's breakpoints per room.

    ``extra_breakpoints[r]`` adds further breakpoints to room r (used when
    outside agents' curves must stay linear too).
    """
    lower, upper = [], []
    for r, p in enumerate(prices):
        bps = inst.room_breakpoints(r)
        if extra_breakpoints is not None:
            bps = sorted(set(bps).union(extra_breakpoints[r]))
        i = bisect_left(bps, p)
        upper.append(bps[i] if i < len(bps) else INF)
        lower.append(bps[i - 1] if i > 0 else -INF)
    return LinearDomain(tuple(lower), tuple(upper))


@dataclass(frozen=True)
class Envy:
    agent: int
    room: int
    gap: Fraction


@dataclass(frozen=True)
class EnvyReport:
    ok: bool
    violations: tuple = ()

    def __bool__(self):
        return self.ok


def check_ef(inst: RentInstance, s: Solution) -> EnvyReport:
    """Exact envy-freeness; each violation carries ``other - own`` > 0."""
    bad = []
    for a, own_room in enumerate(s.allocation):
        own = inst.value(a, own_room, s.prices[own_room])
        for r in range(inst.n):
            other = inst.value(a, r, s.prices[r])
            if other > own:
                bad.append(Envy(a, r, other - own))
    return EnvyReport(not bad, tuple(bad))


def check_eps_ef(inst: RentInstance, s: Solution, eps) -> EnvyReport:
    """Multiplicative eps-envy-freeness, with the factor moved to the other side for negative own utility."""
    eps = as_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    bad = []
    for a, own_room in enumerate(s.allocation):
        own = inst.value(a, own_room, s.prices[own_room])
        for r in range(inst.n):
            other = inst.value(a, r, s.prices[r])
            gap = other - (1 + eps) * own if own >= 0 else (1 + eps) * other - own
            if gap > 0:
                bad.append(Envy(a, r, gap))
    return EnvyReport(not bad, tuple(bad))


def validate_instance(raw, require_nonnegative_base: bool = True) -> RentInstance:
    """Parse the JSON instance shape into a RentInstance, enforcing every invariant."""
    if isinstance(raw, RentInstance):
        inst = raw
    else:
        if not isinstance(raw, dict):
            raise ValidationError("", "instance must be a JSON object")
        if "utilities" not in raw:
            raise ValidationError("utilities", "missing")
        table = raw["utilities"]
        if not isinstance(table, list) or not table:
            raise ValidationError("utilities", "must be a non-empty list of rows")
        n = len(table)
        if "n" in raw and raw["n"] != n:
            raise ValidationError("n", f"n = {raw['n']} but {n} utility rows given")
        eps = None
        if raw.get("epsilon") is not None:
            eps = as_rational(raw["epsilon"], "epsilon")
        rows = []
        for a, row in enumerate(table):
            if not isinstance(row, list) or len(row) != n:
                raise ValidationError(f"utilities[{a}]", f"table is not square: expected {n} entries")
            out = []
            for r, cell in enumerate(row):
                path = f"utilities[{a}][{r}]"
                if not isinstance(cell, dict):
                    raise ValidationError(path, "expected an object")
                for key in ("base", "breakpoints", "slopes"):
                    if key not in cell:
                        raise ValidationError(f"{path}.{key}", "missing")
                try:
                    u = PiecewiseLinearUtility(
                        as_rational(cell["base"], "base"),
                        tuple(as_rational(b, f"breakpoints[{i}]") for i, b in enumerate(cell["breakpoints"])),
                        tuple(as_rational(s, f"slopes[{i}]") for i, s in enumerate(cell["slopes"])),
                        left_slope=None if cell.get("left_slope") is None else as_rational(cell["left_slope"], "left_slope"),
                    )
                except ValidationError as exc:
                    raise ValidationError(f"{path}.{exc.path}", exc.reason) from None
                out.append(u)
            rows.append(tuple(out))
        inst = RentInstance(tuple(rows), eps)
    if require_nonnegative_base:
        for a, row in enumerate(inst.utilities):
            for r, u in enumerate(row):
                if u.base < 0:
                    raise ValidationError(f"utilities[{a}][{r}].base", "base value must be nonnegative")
    return inst
