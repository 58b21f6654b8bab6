"""Executable reductions: piecewise-linear to linear, and linear rent division to a polymatrix game.

Players of the game: 0 is the landlord, 1..n are the agents and n+1 is a
gadget player.  Every player has n+1 actions (rooms 0..n-1 plus an extra
room n).  The landlord's mixed strategy x0 encodes prices through
p_r = M (1 - 3 n x0_r).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InvalidProfile, InvariantViolation, NoPerfectMatching, NotDoublyStochastic, PreconditionViolated
from .matching import RATIONAL, WeightedBipartiteGraph, max_weight_perfect_matching
from .model import PiecewiseLinearUtility, RentInstance, Solution, as_rational, check_ef, evaluate
from .solver import _threshold


@dataclass(frozen=True)
class LinearInstance:
    """v_a(r, x) = H[a][r] - lam[a][r] * x on the whole real line."""

    H: tuple
    lam: tuple

    def __post_init__(self):
        H = tuple(tuple(as_rational(h) for h in row) for row in self.H)
        lam = tuple(tuple(as_rational(s) for s in row) for row in self.lam)
        if any(s <= 0 for row in lam for s in row):
            raise ValueError("linear slopes must be positive")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "lam", lam)

    @property
    def n(self) -> int:
        return len(self.H)

    def value(self, a: int, r: int, x) -> Fraction:
        return self.H[a][r] - self.lam[a][r] * x

    def to_rent_instance(self) -> RentInstance:
        return RentInstance(tuple(
            tuple(PiecewiseLinearUtility.linear(h, s) for h, s in zip(hr, sr)) for hr, sr in zip(self.H, self.lam)
        ))

    @classmethod
    def from_rent_instance(cls, inst: RentInstance) -> "LinearInstance":
        if any(u.pieces != 1 or u.left_slope is not None for row in inst.utilities for u in row):
            raise ValueError("every curve must be a single line")
        return cls(tuple(tuple(u.base for u in row) for row in inst.utilities),
                   tuple(tuple(u.slopes[0] for u in row) for row in inst.utilities))


def reduce_piecewise_to_linear(inst: RentInstance):
    """Linear instance that agrees with ``inst`` beyond its last breakpoint K; returns (instance, K).

    Prices p' of the linear instance map back via p = p' + K.
    """
    K = max(u.breakpoints[-1] for row in inst.utilities for u in row)
    H = tuple(tuple(evaluate(u, K) for u in row) for row in inst.utilities)
    lam = tuple(tuple(u.slopes[-1] for u in row) for row in inst.utilities)
    return LinearInstance(H, lam), K


def lift_solution(s: Solution, K) -> Solution:
    return Solution(s.allocation, tuple(p + K for p in s.prices))


@dataclass(frozen=True)
class PolymatrixGame:
    """``P[a]`` is player a+1's payoff matrix against the landlord; ``Q[a]`` the landlord's in that game."""

    n: int
    M: Fraction
    gamma: Fraction
    eta: Fraction
    P: tuple
    Q: tuple

    @property
    def actions(self) -> int:
        return self.n + 1

    def row_payoffs(self, player: int, x0: Sequence) -> list:
        """Expected payoff of each action of ``player`` (1..n+1) against the landlord's x0."""
        P = self.P[player - 1]
        return [sum((P[r][c] * x0[c] for c in range(self.actions)), Fraction(0)) for r in range(self.actions)]

    def landlord_payoffs(self, others: Sequence[Sequence]) -> list:
        """Expected payoff of each landlord action given players 1..n+1's strategies."""
        m = self.actions
        return [
            sum((xa[r] * self.Q[a][r][c] for a, xa in enumerate(others) for r in range(m)), Fraction(0))
            for c in range(m)
        ]


def _matrix(H, lam, M, n) -> tuple:
    m = n + 1
    return tuple(
        tuple((H[r] - lam[r] * M) + (3 * n * lam[r] * M if r == c else 0) for c in range(m)) for r in range(m)
    )


def build_game(lin: LinearInstance, gamma=1) -> PolymatrixGame:
    gamma = as_rational(gamma)
    n = lin.n
    inst = lin.to_rent_instance()
    M = _threshold(inst, None)
    slack = min(min(lin.value(a, r, 0) for r in range(n)) - max(lin.value(a, r, M) for r in range(n)) for a in range(n))
    eta = slack / 2
    P = []
    for a in range(n):
        extra = max(lin.value(a, r, M) for r in range(n)) + eta
        P.append(_matrix(list(lin.H[a]) + [extra], list(lin.lam[a]) + [Fraction(0)], M, n))
    P.append(_matrix([gamma] * (n + 1), [gamma / (2 * M)] * n + [Fraction(0)], M, n))
    m = n + 1
    neg_identity = tuple(tuple(Fraction(-1 if r == c else 0) for c in range(m)) for r in range(m))
    gadget = tuple(
        tuple(Fraction(0 if r != c else (-1 if r == n else -(n + 1) ** 2)) for c in range(m)) for r in range(m)
    )
    Q = tuple([neg_identity] * n + [gadget])
    return PolymatrixGame(n, M, gamma, eta, tuple(P), Q)


@dataclass(frozen=True)
class StrategyProfile:
    """strategies[0] is the landlord's, strategies[1..n+1] the other players'."""

    strategies: tuple

    def __post_init__(self):
        strategies = tuple(tuple(as_rational(v) for v in x) for x in self.strategies)
        for i, x in enumerate(strategies):
            if any(v < 0 for v in x):
                raise InvalidProfile(f"player {i} has a negative probability")
            if sum(x) != 1:
                raise InvalidProfile(f"player {i}'s probabilities sum to {sum(x)}, not 1")
        object.__setattr__(self, "strategies", strategies)


@dataclass(frozen=True)
class NeReport:
    ok: bool
    violations: tuple  # (player, action, slack > 0)

    def __bool__(self):
        return self.ok


def verify_ne(g: PolymatrixGame, profile: StrategyProfile) -> NeReport:
    """Every action in each player's support must be a best response."""
    xs = profile.strategies
    if len(xs) != g.n + 2 or any(len(x) != g.actions for x in xs):
        raise InvalidProfile(f"expected {g.n + 2} strategies over {g.actions} actions")
    bad = []
    payoff_sets = [g.landlord_payoffs(xs[1:])] + [g.row_payoffs(a, xs[0]) for a in range(1, g.n + 2)]
    for player, payoffs in enumerate(payoff_sets):
        best = max(payoffs)
        for action, prob in enumerate(xs[player]):
            if prob > 0 and payoffs[action] < best:
                bad.append((player, action, best - payoffs[action]))
    return NeReport(not bad, tuple(bad))


def check_claims(g: PolymatrixGame, profile: StrategyProfile) -> dict:
    """Structural facts every equilibrium of the constructed game satisfies."""
    xs = profile.strategies
    n = g.n
    x0, gadget = xs[0], xs[n + 1]
    q = g.landlord_payoffs(xs[1:])
    return {
        "gadget_plays_extra_room": gadget[n] > 0,
        "landlord_full_support": all(v > 0 for v in x0),
        "landlord_indifferent_at_most_minus_one": len(set(q)) == 1 and q[0] <= -1,
        "gadget_pure_extra_room": gadget[n] == 1,
        "agent_columns_sum_to_one": all(sum(xs[a][r] for a in range(1, n + 1)) == 1 for r in range(n)),
    }


def ef_to_candidate(g: PolymatrixGame, s: Solution, lin: LinearInstance = None) -> StrategyProfile:
    """Profile encoding an envy-free solution with 0 <= p <= M (inverse of the price map).

    With ``lin`` given, envy-freeness of ``s`` is checked first.
    """
    n, M = g.n, g.M
    if lin is not None:
        if not check_ef(lin.to_rent_instance(), s).ok:
            raise PreconditionViolated("solution is not envy-free for the linear instance")
        if any(p < 0 or p > M for p in s.prices):
            raise PreconditionViolated(f"prices must lie in [0, M] with M = {M}")
    x0 = [(1 - p / M) / (3 * n) for p in s.prices]
    x0.append(1 - sum(x0))
    if x0[-1] < 0:
        raise InvalidProfile("prices map to a negative landlord probability")
    if any(v < 0 for v in x0):
        raise InvalidProfile("prices above M map to negative probabilities")
    rows = [tuple(Fraction(int(r == s.allocation[a])) for r in range(n + 1)) for a in range(n)]
    gadget = tuple(Fraction(int(r == n)) for r in range(n + 1))
    return StrategyProfile(tuple([tuple(x0)] + rows + [gadget]))


def extract_ef(g: PolymatrixGame, profile: StrategyProfile, lin: LinearInstance = None) -> Solution:
    """Envy-free solution read off an equilibrium: prices from x0, allocation from the agents' support."""
    n, M = g.n, g.M
    xs = profile.strategies
    prices = tuple(M * (1 - 3 * n * xs[0][r]) for r in range(n))
    mat = [[xs[a][r] for r in range(n)] for a in range(1, n + 1)]
    if any(sum(row) != 1 for row in mat) or any(sum(mat[a][r] for a in range(n)) != 1 for r in range(n)):
        raise NotDoublyStochastic("agent strategies restricted to real rooms are not doubly stochastic")
    support = {(a, r): Fraction(0) for a in range(n) for r in range(n) if mat[a][r] > 0}
    try:
        alloc = max_weight_perfect_matching(WeightedBipartiteGraph(n, support, RATIONAL))
    except NoPerfectMatching:  # pragma: no cover - Birkhoff guarantees one
        raise NotDoublyStochastic("support holds no permutation")
    s = Solution(alloc, prices)
    if lin is not None:
        rep = check_ef(lin.to_rent_instance(), s)
        if not rep.ok or any(p < 0 for p in prices):
            raise InvariantViolation("extracted solution is not envy-free with nonnegative prices")
    return s


def linear_instance_of(g: PolymatrixGame) -> LinearInstance:
    """Recover the linear instance from the agents' payoff matrices (the map is invertible)."""
    n, M = g.n, g.M
    H, lam = [], []
    for a in range(n):
        P = g.P[a]
        # off-diagonal entries give H - lam M, the diagonal adds 3 n lam M
        ls = [(P[r][r] - P[r][(r + 1) % (n + 1)]) / (3 * n * M) for r in range(n)]
        lam.append(tuple(ls))
        H.append(tuple(P[r][(r + 1) % (n + 1)] + ls[r] * M for r in range(n)))
    return LinearInstance(tuple(H), tuple(lam))
