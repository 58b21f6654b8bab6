"""Maximum-weight perfect matchings on agent/room graphs, with exact weights.

Additive weights (rationals or integer slope exponents) go through the
Hungarian algorithm.  Multiplicative weights (raw slope magnitudes) are
compared as exact products by enumerating perfect matchings, which is only
allowed for small n.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

from .errors import NoPerfectMatching

RATIONAL = "rational"
EXPONENT = "exponent"
PRODUCT = "product"
MAX_ENUMERATION_N = 8


@dataclass(frozen=True)
class WeightedBipartiteGraph:
    n: int
    weights: Dict[Tuple[int, int], object]
    kind: str = RATIONAL

    @property
    def edges(self) -> frozenset:
        return frozenset(self.weights)

    def neighbours(self, agent: int) -> list:
        return sorted(r for (a, r) in self.weights if a == agent)

    def weight_of(self, perm: Sequence[int]):
        """Total weight of a permutation: sum for additive kinds, product for PRODUCT."""
        if self.kind == PRODUCT:
            total = Fraction(1)
            for a, r in enumerate(perm):
                total *= self.weights[(a, r)]
            return total
        return sum((self.weights[(a, r)] for a, r in enumerate(perm)), 0)

    @classmethod
    def complete(cls, table, kind: str = RATIONAL) -> "WeightedBipartiteGraph":
        n = len(table)
        return cls(n, {(a, r): table[a][r] for a in range(n) for r in range(n)}, kind)


def _hungarian(n: int, weights: dict) -> Optional[list]:
    """Max-weight perfect matching via shortest augmenting paths with potentials.

    Returns agent -> room, or None when no perfect matching exists.
    Missing edges are skipped, never priced.
    """
    INF = None
    cost = [[None if (a, r) not in weights else -weights[(a, r)] for r in range(n)] for a in range(n)]
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    owner = [0] * (n + 1)  # owner[j] = agent (1-based) matched to room j
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        owner[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = owner[j0]
            delta, j1 = INF, -1
            for j in range(1, n + 1):
                if used[j]:
                    continue
                c = cost[i0 - 1][j - 1]
                if c is not None:
                    cur = c - u[i0] - v[j]
                    if minv[j] is None or cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                if minv[j] is not None and (delta is None or minv[j] < delta):
                    delta, j1 = minv[j], j
            if j1 < 0:
                return None
            for j in range(n + 1):
                if used[j]:
                    u[owner[j]] += delta
                    v[j] -= delta
                elif minv[j] is not None:
                    minv[j] -= delta
            j0 = j1
            if owner[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            owner[j0] = owner[j1]
            j0 = j1
    perm = [0] * n
    for j in range(1, n + 1):
        perm[owner[j] - 1] = j - 1
    return perm


def _additive_optimum(n: int, weights: dict):
    perm = _hungarian(n, weights)
    if perm is None:
        return None
    return sum(weights[(a, r)] for a, r in enumerate(perm))


def _lexicographic_additive(g: WeightedBipartiteGraph) -> list:
    best = _additive_optimum(g.n, g.weights)
    if best is None:
        raise NoPerfectMatching(f"no perfect matching on {len(g.weights)} edges")
    # Fix agents in order, each to the smallest room that still admits an optimum.
    fixed: list = []
    weights = dict(g.weights)
    acc = 0
    for a in range(g.n):
        for r in sorted(rr for (aa, rr) in weights if aa == a):
            if r in fixed:
                continue
            rest = {
                (aa - a - 1, rr): w
                for (aa, rr), w in weights.items()
                if aa > a and rr != r and rr not in fixed
            }
            rooms = sorted({rr for rr in range(g.n) if rr != r and rr not in fixed})
            relabel = {rr: k for k, rr in enumerate(rooms)}
            sub = {(aa, relabel[rr]): w for (aa, rr), w in rest.items()}
            sub_best = 0 if not rooms else _additive_optimum(len(rooms), sub)
            if sub_best is not None and acc + weights[(a, r)] + sub_best == best:
                fixed.append(r)
                acc += weights[(a, r)]
                break
        else:  # pragma: no cover - the optimum always extends
            raise AssertionError("lexicographic forcing lost the optimum")
    return fixed


def _enumerate_product(g: WeightedBipartiteGraph) -> list:
    if g.n > MAX_ENUMERATION_N:
        raise ValueError(f"product-weight matching enumerates permutations and needs n <= {MAX_ENUMERATION_N}")
    adj = [g.neighbours(a) for a in range(g.n)]
    best_perm, best_w = None, None
    perm: list = []
    taken = [False] * g.n

    def rec(a: int, w: Fraction):
        nonlocal best_perm, best_w
        if a == g.n:
            if best_w is None or w > best_w:
                best_perm, best_w = list(perm), w
            return
        for r in adj[a]:
            if not taken[r]:
                taken[r] = True
                perm.append(r)
                rec(a + 1, w * g.weights[(a, r)])
                perm.pop()
                taken[r] = False

    rec(0, Fraction(1))
    if best_perm is None:
        raise NoPerfectMatching(f"no perfect matching on {len(g.weights)} edges")
    return best_perm


def max_weight_perfect_matching(g: WeightedBipartiteGraph) -> tuple:
    """Max-weight perfect matching, ties broken towards the lexicographically smallest permutation.

    >>> g = WeightedBipartiteGraph.complete([[3, 1], [3, 2]])
    >>> max_weight_perfect_matching(g)
    (0, 1)
    """
    if g.kind == PRODUCT:
        return tuple(_enumerate_product(g))
    return tuple(_lexicographic_additive(g))


def first_choice_graph(inst, p: Sequence, domain=None) -> WeightedBipartiteGraph:
    """Edges to each agent's utility-maximizing rooms at ``p``, weighted by the local slope.

    The slope used is the one on the linear domain containing ``p``, i.e. the
    left derivative at each price.  Structured instances get exponent weights,
    everything else product weights.
    """
    n = inst.n
    weights = {}
    for a in range(n):
        vals = [inst.value(a, r, p[r]) for r in range(n)]
        top = max(vals)
        for r in range(n):
            if vals[r] == top:
                u = inst.utilities[a][r]
                weights[(a, r)] = u.exponent_left_of(p[r]) if inst.structured else u.slope_left_of(p[r])
    return WeightedBipartiteGraph(n, weights, EXPONENT if inst.structured else PRODUCT)
