"""Round utility slopes to powers of (1+eps) so envy-freeness transfers approximately.

Each finite piece is replaced by a shallow segment (slope lam_bar/(1+eps))
followed by a steep one (slope lam_bar), where lam_bar is the smallest power
of (1+eps) not below the original slope.  The split point is chosen so the
curve still passes through both original endpoints.  Zero crossings are made
breakpoints first, so signs never change.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List

from .errors import ValidationError
from .model import (
    EnvyReport,
    PiecewiseLinearUtility,
    RentInstance,
    Solution,
    as_rational,
    ceil_exponent,
    check_eps_ef,
    evaluate,
    zero_crossing,
)


@dataclass(frozen=True)
class PieceDescriptor:
    """A piece on [x1, x2] (x2 = None for the unbounded last piece) with endpoint values H and B."""

    x1: Fraction
    x2: object
    slope: Fraction
    H: Fraction
    B: object


@dataclass(frozen=True)
class RoundedPiece:
    piece: PieceDescriptor
    exponent: int  # lam_bar = (1+eps)**exponent
    lam_bar: Fraction
    x_star: object  # split point; None for the unbounded piece


def pieces_of(u: PiecewiseLinearUtility, with_zero: bool = True) -> List[PieceDescriptor]:
    """Pieces of ``u`` on [0, inf), optionally cut at the zero crossing."""
    bps = list(u.breakpoints)
    if with_zero:
        z = zero_crossing(u)
        if z > 0 and z not in bps:
            bps = sorted(bps + [z])
    out = []
    for i, x1 in enumerate(bps):
        x2 = bps[i + 1] if i + 1 < len(bps) else None
        lam = u.slope_left_of(x2) if x2 is not None else u.slopes[-1]
        out.append(PieceDescriptor(x1, x2, lam, evaluate(u, x1), None if x2 is None else evaluate(u, x2)))
    return out


def split_point(piece: PieceDescriptor, lam_bar: Fraction, eps: Fraction) -> Fraction:
    """x* with H = B + lam_bar (x2 - x*) + lam_bar/(1+eps) (x* - x1)."""
    if lam_bar == piece.slope:
        return piece.x1
    shallow = lam_bar / (1 + eps)
    return (lam_bar * piece.x2 - shallow * piece.x1 - (piece.H - piece.B)) / (lam_bar - shallow)


def round_pieces(u: PiecewiseLinearUtility, eps) -> List[RoundedPiece]:
    eps = as_rational(eps, "epsilon")
    out = []
    for pc in pieces_of(u):
        k = ceil_exponent(pc.slope, eps)
        lam_bar = (1 + eps) ** k
        x_star = None if pc.x2 is None else split_point(pc, lam_bar, eps)
        out.append(RoundedPiece(pc, k, lam_bar, x_star))
    return out


def round_utility(u: PiecewiseLinearUtility, eps) -> PiecewiseLinearUtility:
    """Rounded curve; every slope (including the leftward one) is a power of 1+eps."""
    eps = as_rational(eps, "epsilon")
    if eps <= 0:
        raise ValidationError("epsilon", "epsilon must be positive")
    if u.base < 0:
        raise ValidationError("base", "rounding needs a nonnegative base value")
    base = 1 + eps
    bps, lams, ks = [], [], []

    def push(x, k):
        if bps and bps[-1] == x:  # zero-length piece
            bps.pop(), lams.pop(), ks.pop()
        bps.append(x)
        lams.append(base ** k)
        ks.append(k)

    for rp in round_pieces(u, eps):
        pc = rp.piece
        exact = rp.lam_bar == pc.slope
        if pc.x2 is None:
            # unbounded piece: the split point sits at infinity, so only the shallow part remains
            push(pc.x1, rp.exponent if exact else rp.exponent - 1)
        elif exact:
            push(pc.x1, rp.exponent)
        else:
            push(pc.x1, rp.exponent - 1)
            push(rp.x_star, rp.exponent)
    left_k = ceil_exponent(u.leftward_slope, eps)
    out = PiecewiseLinearUtility(u.base, tuple(bps), tuple(lams), tuple(ks), base ** left_k, left_k)
    return out.normalized()


def round_instance(inst: RentInstance, eps) -> RentInstance:
    """Structured instance whose envy-free solutions are eps-envy-free for ``inst``.

    >>> from fractions import Fraction as F
    >>> inst = RentInstance.from_functions([[(2, F(3, 2))]])
    >>> r = round_instance(inst, 1).utilities[0][0]
    >>> [str(b) for b in r.breakpoints], [str(s) for s in r.slopes]
    (['0', '2/3', '4/3'], ['1', '2', '1'])
    """
    eps = as_rational(eps, "epsilon")
    rows = []
    for a, row in enumerate(inst.utilities):
        out = []
        for r, u in enumerate(row):
            try:
                out.append(round_utility(u, eps))
            except ValidationError as exc:
                raise ValidationError(f"utilities[{a}][{r}].{exc.path}", exc.reason) from None
        rows.append(tuple(out))
    return RentInstance(tuple(rows), eps)


def sandwich_holds(rp: RoundedPiece, eps) -> bool:
    """lam_bar/(1+eps) < lam <= lam_bar, exactly."""
    return rp.lam_bar / (1 + eps) < rp.piece.slope <= rp.lam_bar


@dataclass(frozen=True)
class CertReport:
    ok: bool
    dominance_failures: tuple
    sign_failures: tuple
    eps_ef: EnvyReport

    def __bool__(self):
        return self.ok


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def certify_transfer(original: RentInstance, rounded: RentInstance, s: Solution, eps) -> CertReport:
    """Check rounded >= original and matching signs at every solution price, then eps-EF on the original."""
    eps = as_rational(eps, "epsilon")
    dom, sign = [], []
    for a in range(original.n):
        for r in range(original.n):
            x = s.prices[r]
            v, vb = original.value(a, r, x), rounded.value(a, r, x)
            if vb < v:
                dom.append((a, r, x))
            if _sign(v) != _sign(vb):
                sign.append((a, r, x))
    rep = check_eps_ef(original, s, eps)
    return CertReport(not dom and not sign and rep.ok, tuple(dom), tuple(sign), rep)
