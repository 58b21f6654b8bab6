"""Envy-free prices for piecewise-linear utilities by walking down from high prices.

The walk starts from an envy-free solution of a surrogate instance whose
utilities turn quasilinear above a threshold M, then repeatedly re-matches
agents on the first-choice graph and lowers prices with an LP confined to the
current linear domain.  It stops once some room is free (or, in fixed-rent
mode, once prices add up to the rent).
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

from .errors import IterationLimitExceeded, InvariantViolation, PreconditionViolated
from .lp import GE, LinearProgram, solve_lp
from .matching import (
    MAX_ENUMERATION_N,
    first_choice_graph,
    max_weight_perfect_matching,
)
from .model import (
    LinearDomain,
    PiecewiseLinearUtility,
    RentInstance,
    Solution,
    as_rational,
    check_ef,
    linear_domain,
    zero_crossing,
)
from .quasilinear import shift_prices, solve_quasilinear

logger = logging.getLogger(__name__)

ZERO_PRICE = "zero_price"
FIXED_RENT = "fixed_rent"


@dataclass(frozen=True)
class SolveMode:
    kind: str = ZERO_PRICE
    total_rent: Optional[Fraction] = None

    @classmethod
    def fixed_rent(cls, C) -> "SolveMode":
        return cls(FIXED_RENT, as_rational(C, "total_rent"))

    @property
    def is_fixed_rent(self) -> bool:
        return self.kind == FIXED_RENT


@dataclass(frozen=True)
class SurrogateInstance:
    """``instance`` agrees with ``original`` up to ``M`` and has slope 1 beyond it."""

    original: RentInstance
    M: Fraction
    instance: RentInstance


def _truncate(u: PiecewiseLinearUtility, M: Fraction) -> PiecewiseLinearUtility:
    keep = [i for i, b in enumerate(u.breakpoints) if b < M]
    bps = tuple(u.breakpoints[i] for i in keep) + (M,)
    lams = tuple(u.slopes[i] for i in keep) + (Fraction(1),)
    ks = None
    if u.exponents is not None:
        ks = tuple(u.exponents[i] for i in keep) + (0,)
    return PiecewiseLinearUtility(u.base, bps, lams, ks, u.left_slope, u.left_exponent)


def _threshold(inst: RentInstance, C: Optional[Fraction]) -> Fraction:
    """Smallest verified M >= max(1, C) so that every room at M is worse than any room at C (0 if None)."""
    anchor = Fraction(0) if C is None else C
    bases = [u.base for row in inst.utilities for u in row]
    min_slope = min(s for row in inst.utilities for u in row for s in u.slopes)
    floor_at_anchor = min(inst.value(a, r, anchor) for a in range(inst.n) for r in range(inst.n))
    M = (max(bases) - floor_at_anchor) / min_slope
    M = max(M, Fraction(1), anchor)

    def ok(M):
        for a in range(inst.n):
            worst_at_anchor = min(inst.value(a, r, anchor) for r in range(inst.n))
            if any(inst.value(a, r, M) >= worst_at_anchor for r in range(inst.n)):
                return False
        return True

    while not ok(M):
        M += 1
    return M


def build_surrogate(inst: RentInstance, total_rent=None) -> SurrogateInstance:
    """Append the threshold M as a final breakpoint and continue with slope 1 past it.

    With ``total_rent`` C the threshold also satisfies M >= C and
    v_a(r, C) > v_a(r', M) for all agents and rooms.
    """
    C = None if total_rent is None else as_rational(total_rent)
    M = _threshold(inst, C)
    rows = tuple(tuple(_truncate(u, M) for u in row) for row in inst.utilities)
    return SurrogateInstance(inst, M, RentInstance(rows, inst.structured_epsilon))


# --- potential ---------------------------------------------------------------


@dataclass(frozen=True)
class Potential:
    """Progress measure over (allocation, linear domain) states.

    ``phi1`` rewards lower bounds close to zero; ``phi2`` is the normalized
    matching weight (exponent units) for structured instances.  Instances
    without exponents carry the raw slope ``product`` instead and compare
    lexicographically.
    """

    phi1: int
    phi2: Optional[Fraction]
    product: Optional[Fraction]
    capped: bool
    cap: int

    @property
    def value(self) -> Optional[Fraction]:
        if self.capped:
            return Fraction(self.cap)
        return None if self.phi2 is None else self.phi1 + self.phi2

    def key(self) -> tuple:
        if self.capped:
            return (Fraction(self.cap), Fraction(0))
        if self.phi2 is not None:
            return (self.phi1 + self.phi2, Fraction(0))
        return (Fraction(self.phi1), self.product)


def _piece_count_below(u: PiecewiseLinearUtility, L) -> int:
    return sum(1 for b in u.breakpoints if b <= L) - 1


def _potential(sur: RentInstance, allocation, domain: LinearDomain, capped: bool, fixed_rent: bool) -> Potential:
    n = sur.n
    ell = sum(u.pieces for row in sur.utilities for u in row)
    phi1 = 0
    for r in range(n):
        for a in range(n):
            u = sur.utilities[a][r]
            phi1 += u.pieces - _piece_count_below(u, domain.lower[r])
    cap = ell + 1 + (n * n if fixed_rent else 0)
    # slopes inside the domain are the left slopes at its upper corner
    corner = [domain.upper[r] if domain.upper[r] != math.inf else domain.lower[r] + 1 for r in range(n)]
    phi2 = product = None
    if sur.structured:
        ks = [k for row in sur.utilities for u in row for k in (u.exponents + ((u.left_exponent,) if u.left_slope is not None else ()))]
        kmin, kmax = min(ks), max(ks)
        w = sum(sur.utilities[a][r].exponent_left_of(corner[r]) for a, r in enumerate(allocation))
        phi2 = Fraction(w - n * kmin, n * (kmax - kmin) + 1)
    else:
        product = Fraction(1)
        for a, r in enumerate(allocation):
            product *= sur.utilities[a][r].slope_left_of(corner[r])
    return Potential(phi1, phi2, product, capped, cap)


def compute_potential(sur: SurrogateInstance, allocation: Sequence[int], domain: LinearDomain, mode: SolveMode = SolveMode()) -> Potential:
    """Potential of the state (allocation, domain); capped when its min-price point ends the walk."""
    inst = sur.instance
    corner = [domain.upper[r] if domain.upper[r] != math.inf else domain.lower[r] + 1 for r in range(inst.n)]
    lp = _walk_lp(inst, allocation, corner, domain, mode, [])
    res = solve_lp(lp)
    if not res.optimal:
        raise PreconditionViolated("allocation has no envy-free prices inside this linear domain")
    capped = _finished(res.x, mode)
    return _potential(inst, allocation, domain, capped, mode.is_fixed_rent)


# --- trace -------------------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    """State after iteration ``iteration``.

    For iteration i >= 1, ``allocation`` was matched at the previous prices and
    ``prices`` solve the LP over ``domain`` (the previous prices' linear domain).
    Iteration 0 is the bootstrap.
    """

    iteration: int
    prices: tuple
    allocation: tuple
    domain: LinearDomain
    domain_change: bool
    weight: object = None
    potential: Optional[Potential] = None


@dataclass
class IterationTrace:
    surrogate: SurrogateInstance
    mode: SolveMode
    steps: List[TraceStep] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.steps) - 1

    @property
    def domain_changes(self) -> int:
        return sum(1 for s in self.steps[1:] if s.domain_change)

    def allocations(self) -> list:
        return [s.allocation for s in self.steps]

    def per_domain_counts(self) -> list:
        """Lengths of maximal runs of iterations that shared one LP domain."""
        counts: list = []
        prev = None
        for s in self.steps[1:]:
            if prev is not None and s.domain == prev:
                counts[-1] += 1
            else:
                counts.append(1)
            prev = s.domain
        return counts

    def to_csv(self) -> str:
        n = self.surrogate.original.n
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iteration"] + [f"price_{r + 1}" for r in range(n)]
                   + ["allocation", "domain_change", "weight", "phi1", "phi2_numerator", "phi2_denominator"])
        for s in self.steps:
            pot = s.potential
            if pot is None:
                phi = ["", "", ""]
            elif pot.capped:
                phi = [pot.cap, 0, 1]
            elif pot.phi2 is not None:
                phi = [pot.phi1, pot.phi2.numerator, pot.phi2.denominator]
            else:
                phi = [pot.phi1, "", ""]
            w.writerow([s.iteration] + [str(p) for p in s.prices]
                       + [" ".join(str(r) for r in s.allocation), int(s.domain_change),
                          "" if s.weight is None else str(s.weight)] + phi)
        return buf.getvalue()


# --- the walk ----------------------------------------------------------------


@dataclass(frozen=True)
class CrossConstraint:
    """Keep ``utilities[r](x_r) <= bound`` for every walked room r (an outside agent's row)."""

    utilities: tuple
    bound: Fraction


def _affine(u: PiecewiseLinearUtility, x):
    """(c, lam) with u(y) = c - lam*y on the linear piece just left of x."""
    lam = u.slope_left_of(x)
    return u(x) + lam * x, lam


def _walk_lp(inst: RentInstance, allocation, prices, domain: LinearDomain, mode: SolveMode, cross,
             cap_at_prices: bool = False) -> LinearProgram:
    """Min-sum envy-free prices for ``allocation`` inside ``domain``, linearized around ``prices``.

    With ``cap_at_prices`` no price may rise above ``prices``.  Without a
    total-rent row that cap never binds (envy-free prices of one allocation
    in one domain are closed under componentwise minimum); with it, it keeps
    the walk monotone when many points reach the rent.
    """
    n = inst.n
    lower = list(domain.lower)
    if not mode.is_fixed_rent:
        lower = [max(lo, Fraction(0)) for lo in lower]
    lower = [Fraction(lo) if lo != -math.inf else lo for lo in lower]
    upper = list(domain.upper)
    if cap_at_prices:
        upper = [min(u, p) for u, p in zip(upper, prices)]
    lp = LinearProgram(n, [1] * n, [], lower, upper)
    lines = [[_affine(inst.utilities[a][r], prices[r]) for r in range(n)] for a in range(n)]
    for a, own in enumerate(allocation):
        c_own, l_own = lines[a][own]
        for r in range(n):
            if r == own:
                continue
            c_r, l_r = lines[a][r]
            row = [0] * n
            row[own] -= l_own
            row[r] += l_r
            lp.add(row, GE, c_r - c_own)
    for cc in cross:
        for r in range(n):
            c, lam = _affine(cc.utilities[r], prices[r])
            row = [0] * n
            row[r] = lam
            lp.add(row, GE, c - cc.bound)
    if mode.is_fixed_rent:
        lp.add([1] * n, GE, mode.total_rent)
    return lp


def _finished(x, mode: SolveMode) -> bool:
    if mode.is_fixed_rent:
        return sum(x) == mode.total_rent
    return any(v == 0 for v in x)


def _cross_tight(x, cross) -> bool:
    return any(cc.utilities[r](x[r]) == cc.bound for cc in cross for r in range(len(x)))


def _bit_size(inst: RentInstance) -> int:
    vals = [u.base for row in inst.utilities for u in row]
    vals += [v for row in inst.utilities for u in row for v in u.breakpoints + u.slopes]
    vals += [u.left_slope for row in inst.utilities for u in row if u.left_slope is not None]
    if inst.structured:
        vals.append(inst.structured_epsilon)
    return max(v.numerator.bit_length() + v.denominator.bit_length() for v in vals)


def iteration_bound(inst: RentInstance) -> Fraction:
    """6 * beta * n * ell / eps for structured instances (beta = max bit size of an input number)."""
    if not inst.structured:
        raise ValueError("the iteration bound is stated for structured instances")
    return Fraction(6 * _bit_size(inst) * inst.n * inst.total_pieces()) / inst.structured_epsilon


def default_iteration_cap(inst: RentInstance) -> int:
    n, ell = inst.n, inst.total_pieces()
    if inst.structured:
        return 2 * math.ceil(iteration_bound(inst)) + 2 * n
    # at most n! distinct matching weights inside each of at most ell + n + 1 domains
    return 2 * math.factorial(n) * (ell + n + 1)


def walk(
    inst: RentInstance,
    allocation: Sequence[int],
    prices: Sequence,
    mode: SolveMode = SolveMode(),
    cross: Sequence[CrossConstraint] = (),
    max_iterations: Optional[int] = None,
    trace: Optional[IterationTrace] = None,
    extra_breakpoints: Optional[Sequence] = None,
):
    """Run the price-lowering walk from an envy-free start on ``inst``.

    Returns the final (allocation, prices).  Steps are appended to ``trace``
    with potentials when one is given.
    """
    n = inst.n
    if not inst.structured and n > MAX_ENUMERATION_N:
        raise PreconditionViolated(f"instances without exponents need n <= {MAX_ENUMERATION_N}; round first")
    cap = default_iteration_cap(inst) if max_iterations is None else max_iterations
    alloc = tuple(allocation)
    p = tuple(Fraction(x) for x in prices)
    dom = linear_domain(inst, p, extra_breakpoints)
    if trace is not None and not trace.steps:
        trace.steps.append(TraceStep(0, p, alloc, dom, False))
    done = _finished(p, mode) or _cross_tight(p, cross)
    i = 0
    while not done:
        i += 1
        if i > cap:
            raise IterationLimitExceeded(f"walk exceeded {cap} iterations")
        g = first_choice_graph(inst, p)
        alloc = max_weight_perfect_matching(g)
        res = solve_lp(_walk_lp(inst, alloc, p, dom, mode, cross, cap_at_prices=True))
        if not res.optimal:
            raise InvariantViolation(f"walk LP is {res.status} at iteration {i}")
        new_p = res.x
        new_dom = linear_domain(inst, new_p, extra_breakpoints)
        done = _finished(new_p, mode) or _cross_tight(new_p, cross)
        if trace is not None:
            pot = _potential(inst, alloc, dom, _finished(new_p, mode), mode.is_fixed_rent)
            trace.steps.append(TraceStep(len(trace.steps), new_p, alloc, dom, new_dom != dom, g.weight_of(alloc), pot))
        logger.debug("iteration %d: allocation %s prices %s", i, alloc, [str(x) for x in new_p])
        p, dom = new_p, new_dom
    return alloc, p


def solve(inst: RentInstance, mode: SolveMode = SolveMode(), max_iterations: Optional[int] = None):
    """Envy-free solution of ``inst`` plus the full iteration trace.

    Zero-price mode ends with some room free; fixed-rent mode ends with
    prices summing to the total rent (possibly with negative prices).
    """
    if inst.n > MAX_ENUMERATION_N and not inst.structured:
        raise PreconditionViolated(f"instances without exponents need n <= {MAX_ENUMERATION_N}; round first")
    sur = build_surrogate(inst, mode.total_rent if mode.is_fixed_rent else None)
    M = sur.M
    boot = solve_quasilinear([[inst.value(a, r, M) for r in range(inst.n)] for a in range(inst.n)])
    start = shift_prices(boot, M)
    trace = IterationTrace(sur, mode)
    alloc, p = walk(sur.instance, start.allocation, start.prices, mode, (), max_iterations, trace)
    s = Solution(alloc, p)
    report = check_ef(inst, s)
    if not report.ok:
        raise InvariantViolation(f"walk output is not envy-free: {report.violations[:3]}")
    if any(x > M for x in p):
        raise InvariantViolation("final prices exceed the threshold M")
    if mode.is_fixed_rent:
        if sum(p) != mode.total_rent:
            raise InvariantViolation("prices do not add up to the total rent")
    elif not any(x == 0 for x in p) or any(x < 0 for x in p):
        raise InvariantViolation("zero-price mode must end with nonnegative prices and a free room")
    return s, trace


def solve_fixed_rent_nonneg(inst: RentInstance, C, original: Optional[RentInstance] = None) -> Solution:
    """Split total rent C with every agent's utility nonnegative.

    Needs sum_r z_a(r) >= C for each agent, where z is the zero crossing.  When
    ``inst`` is a rounded version of ``original`` the precondition and the
    utility check refer to ``original``.
    """
    C = as_rational(C, "total_rent")
    ref = inst if original is None else original
    check_nonneg_precondition(ref, C)
    s, _ = solve(inst, SolveMode.fixed_rent(C))
    check_nonneg_utilities(ref, s)
    return s


def check_nonneg_precondition(inst: RentInstance, C) -> None:
    for a in range(inst.n):
        total = sum(zero_crossing(u) for u in inst.utilities[a])
        if total < C:
            raise PreconditionViolated(f"agent {a}: sum of zero crossings {total} < total rent {C}")


def check_nonneg_utilities(inst: RentInstance, s: Solution) -> None:
    for a, util in enumerate(s.utilities(inst)):
        if util < 0:
            raise InvariantViolation(f"agent {a} ends with negative utility {util}")
