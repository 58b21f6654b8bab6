"""Componentwise-minimal envy-free prices, and a sampling check of truthfulness.

A room's price is already minimal exactly when the room can be reached from
a free room in the graph made of reversed allocation edges and tight
(indifference) edges.  The remaining rooms are walked down together while
the reachable side stays frozen, until a new tight edge or a free room
appears.  Each round shrinks the unreached set.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import InvariantViolation, PreconditionViolated
from .model import RentInstance, Solution, check_ef
from .solver import CrossConstraint, SolveMode, build_surrogate, solve, walk


def tight_set(inst: RentInstance, s: Solution) -> frozenset:
    """Pairs (a, r), r not a's room, where a is exactly indifferent between its room and r."""
    out = set()
    for a, own in enumerate(s.allocation):
        mine = inst.value(a, own, s.prices[own])
        for r in range(inst.n):
            if r != own and inst.value(a, r, s.prices[r]) == mine:
                out.add((a, r))
    return frozenset(out)


@dataclass(frozen=True)
class WGraph:
    """Directed graph: room pi(a) -> agent a, and agent a -> room r for tight (a, r)."""

    allocation: tuple
    tight: frozenset

    def edges(self) -> list:
        out = [(("room", r), ("agent", a)) for a, r in enumerate(self.allocation)]
        out += [(("agent", a), ("room", r)) for a, r in sorted(self.tight)]
        return out

    def reachable_rooms(self, sources) -> frozenset:
        owner = {r: a for a, r in enumerate(self.allocation)}
        out_of = {}
        for a, r in self.tight:
            out_of.setdefault(a, []).append(r)
        seen = set(sources)
        queue = deque(sorted(seen))
        while queue:
            r = queue.popleft()
            for r2 in out_of.get(owner[r], ()):
                if r2 not in seen:
                    seen.add(r2)
                    queue.append(r2)
        return frozenset(seen)


@dataclass(frozen=True)
class PricePartition:
    E: frozenset  # rooms already at their optimal price
    Ec: frozenset
    Z: frozenset  # free rooms


def compute_partition(inst: RentInstance, s: Solution) -> PricePartition:
    if any(p < 0 for p in s.prices):
        raise PreconditionViolated("partition needs nonnegative prices")
    Z = frozenset(r for r, p in enumerate(s.prices) if p == 0)
    E = WGraph(s.allocation, tight_set(inst, s)).reachable_rooms(Z)
    return PricePartition(E, frozenset(range(inst.n)) - E, Z)


def optimal_solve(inst: RentInstance, max_iterations: Optional[int] = None, history: Optional[list] = None) -> Solution:
    """Envy-free solution whose price vector is below every other nonnegative envy-free one.

    ``history`` (if given) receives each intermediate solution.
    """
    s, _ = solve(inst, SolveMode(), max_iterations)
    sur = build_surrogate(inst).instance
    part = compute_partition(inst, s)
    if history is not None:
        history.append((s, part))
    while part.Ec:
        rooms = sorted(part.Ec)
        owner = {r: a for a, r in enumerate(s.allocation)}
        agents = [owner[r] for r in rooms]
        local = {r: i for i, r in enumerate(rooms)}
        sub = RentInstance(
            tuple(tuple(sur.utilities[a][r] for r in rooms) for a in agents), inst.structured_epsilon
        )
        frozen = [a for a in range(inst.n) if s.allocation[a] not in part.Ec]
        cross = [
            CrossConstraint(
                tuple(sur.utilities[a][r] for r in rooms),
                inst.value(a, s.allocation[a], s.prices[s.allocation[a]]),
            )
            for a in frozen
        ]
        extra = [sorted({b for a in frozen for b in sur.utilities[a][r].breakpoints}) for r in rooms]
        sub_alloc = [local[s.allocation[a]] for a in agents]
        sub_prices = [s.prices[r] for r in rooms]
        alloc2, p2 = walk(sub, sub_alloc, sub_prices, SolveMode(), cross, max_iterations, None, extra)
        allocation = list(s.allocation)
        prices = list(s.prices)
        for i, a in enumerate(agents):
            allocation[a] = rooms[alloc2[i]]
        for i, r in enumerate(rooms):
            prices[r] = p2[i]
        s = Solution(tuple(allocation), tuple(prices))
        rep = check_ef(inst, s)
        if not rep.ok:
            raise InvariantViolation(f"merge broke envy-freeness: {rep.violations[:3]}")
        new_part = compute_partition(inst, s)
        if len(new_part.Ec) >= len(part.Ec):
            raise InvariantViolation("unreached room set did not shrink")
        part = new_part
        if history is not None:
            history.append((s, part))
    return s


@dataclass(frozen=True)
class Improvement:
    deviation: int
    agent: int
    truthful_utility: Fraction
    deviating_utility: Fraction


@dataclass(frozen=True)
class DsicReport:
    ok: bool
    checked: int
    improvements: tuple

    def __bool__(self):
        return self.ok


def check_dsic_sample(inst: RentInstance, deviations: Sequence[Tuple[int, Sequence]]) -> DsicReport:
    """Compare each misreport's outcome (scored with true utilities) against the truthful one.

    ``deviations`` holds (agent, reported utility row) pairs.
    """
    truthful = optimal_solve(inst)
    found: List[Improvement] = []
    for i, (agent, row) in enumerate(deviations):
        honest = inst.value(agent, truthful.allocation[agent], truthful.prices[truthful.allocation[agent]])
        lie = optimal_solve(inst.with_row(agent, row))
        got = inst.value(agent, lie.allocation[agent], lie.prices[lie.allocation[agent]])
        if got > honest:
            found.append(Improvement(i, agent, honest, got))
    return DsicReport(not found, len(deviations), tuple(found))
