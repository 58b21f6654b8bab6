import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from rentdiv.errors import ValidationError
from rentdiv.generators import random_instance
from rentdiv.model import (
    PiecewiseLinearUtility,
    RentInstance,
    Solution,
    as_rational,
    check_ef,
    check_eps_ef,
    evaluate,
    linear_domain,
    validate_instance,
    zero_crossing,
)

from conftest import chained_instance, lin, utilities


def reference_value(u, x):
    """Independent evaluator: integrate the slope over [0, x] piece by piece."""
    if x < 0:
        return u.base - u.leftward_slope * x
    total = u.base
    for i, b in enumerate(u.breakpoints):
        end = u.breakpoints[i + 1] if i + 1 < len(u.breakpoints) else math.inf
        if x <= b:
            break
        total -= u.slopes[i] * (min(x, end) - b)
    return total


def test_evaluate_single_line_hits_zero():
    assert evaluate(lin(8, 8), 1) == 0


def test_evaluate_two_pieces():
    u = PiecewiseLinearUtility(2, (0, 1), (1, 3))
    assert evaluate(u, 2) == -2


def test_evaluate_at_zero_is_base():
    u = PiecewiseLinearUtility(F(7, 3), (0, 1, F(5, 2)), (1, 3, F(1, 2)))
    assert evaluate(u, 0) == F(7, 3)


def test_evaluate_extends_first_piece_left():
    u = PiecewiseLinearUtility(2, (0, 1), (F(1, 2), 3))
    assert evaluate(u, -4) == 4


def test_explicit_left_slope():
    u = PiecewiseLinearUtility(2, (0,), (1,), left_slope=3)
    assert evaluate(u, -1) == 5
    assert u.slope_left_of(0) == 3
    assert u.slope_left_of(1) == 1


def test_zero_crossing_examples():
    assert zero_crossing(lin(2, F(3, 2))) == F(4, 3)
    assert zero_crossing(lin(0, 5)) == 0
    u = PiecewiseLinearUtility(4, (0, 1), (1, 3))
    assert zero_crossing(u) == 2
    assert evaluate(u, zero_crossing(u)) == 0


def test_zero_crossing_negative_base():
    assert zero_crossing(lin(-3, 2)) == F(-3, 2)


def test_linear_domain_at_breakpoint():
    u = PiecewiseLinearUtility(10, (0, 3, 5), (1, 1, 1))
    inst = RentInstance(((u,),))
    d = linear_domain(inst, [3])
    assert (d.lower, d.upper) == ((0,), (3,))


def test_linear_domain_unbounded_above():
    inst = RentInstance(((lin(9, 1),),))
    d = linear_domain(inst, [7])
    assert d.lower == (0,) and d.upper == (math.inf,)


def test_linear_domain_pools_agents():
    u1 = PiecewiseLinearUtility(10, (0, 2), (1, 2))
    u2 = PiecewiseLinearUtility(10, (0, 4), (1, 2))
    inst = RentInstance(((u1, lin(1, 1)), (u2, lin(1, 1))))
    d = linear_domain(inst, [3, 1])
    assert (d.lower[0], d.upper[0]) == (2, 4)


def test_linear_domain_extra_breakpoints():
    inst = RentInstance(((lin(9, 1),),))
    d = linear_domain(inst, [7], [[5, 8]])
    assert (d.lower, d.upper) == ((5,), (8,))


def test_check_ef_zero_prices_identity(chained):
    rep = check_ef(chained, Solution((0, 1, 2), (0, 0, 0)))
    assert rep.ok and not rep.violations


def test_check_ef_identical_agents_unequal_utilities():
    inst = RentInstance.quasilinear([[4, 2], [4, 2]])
    rep = check_ef(inst, Solution((0, 1), (1, 0)))
    assert not rep.ok
    assert [(v.agent, v.room, v.gap) for v in rep.violations] == [(1, 0, 1)]


def test_check_ef_matches_pairwise_comparison():
    for seed in range(10):
        inst = random_instance(3, 3, seed)
        s = Solution((2, 0, 1), (F(seed), F(1, 2), F(3)))
        rep = check_ef(inst, s)
        expected = sorted(
            (a, r) for a in range(3) for r in range(3)
            if reference_value(inst.utilities[a][r], s.prices[r])
            > reference_value(inst.utilities[a][s.allocation[a]], s.prices[s.allocation[a]])
        )
        assert sorted((v.agent, v.room) for v in rep.violations) == expected


def _two_room(own, other):
    # agent 0 owns room 0 priced at 0; room 1 at price 0 gives `other`
    inst = RentInstance(((lin(own, 1), lin(other, 1)), (lin(own, 1), lin(other, 1))))
    return inst, Solution((0, 1), (0, 0))


def test_eps_ef_nonnegative_own():
    inst, s = _two_room(10, F(21, 2))
    rep = [v for v in check_eps_ef(inst, s, F(1, 10)).violations if v.agent == 0]
    assert rep == []
    rep = [v for v in check_eps_ef(inst, s, F(1, 100)).violations if v.agent == 0]
    assert len(rep) == 1 and rep[0].gap == F(21, 2) - F(101, 100) * 10


def test_eps_ef_negative_own():
    inst, s = _two_room(-2, -1)
    for eps in (F(1, 10), F(1, 2), F(9, 10)):
        rep = [v for v in check_eps_ef(inst, s, eps).violations if v.agent == 0]
        assert len(rep) == 1 and rep[0].gap == -(1 + eps) + 2


def test_eps_ef_rejects_nonpositive_eps(chained):
    with pytest.raises(ValueError):
        check_eps_ef(chained, Solution((0, 1, 2), (0, 0, 0)), 0)


def test_as_rational_rejects_floats_and_bools():
    with pytest.raises(ValidationError):
        as_rational(1.5)
    with pytest.raises(ValidationError):
        as_rational(True)
    assert as_rational("3/4") == F(3, 4)


def _cell(base="1", bps=("0",), slopes=("1",)):
    return {"base": base, "breakpoints": list(bps), "slopes": list(slopes)}


def test_validate_rejects_zero_slope():
    with pytest.raises(ValidationError, match="monotone decreasing violated") as exc:
        validate_instance({"utilities": [[_cell(slopes=("0",))]]})
    assert exc.value.path == "utilities[0][0].slopes[0]"


def test_validate_rejects_non_power_slope():
    with pytest.raises(ValidationError, match=r"not a power of \(1\+eps\)"):
        validate_instance({"epsilon": "1", "utilities": [[_cell(slopes=("3/2",))]]})


def test_validate_rejects_non_square():
    with pytest.raises(ValidationError, match="not square"):
        validate_instance({"utilities": [[_cell(), _cell()], [_cell()]]})


def test_validate_rejects_non_increasing_breakpoints():
    with pytest.raises(ValidationError, match="strictly increasing"):
        validate_instance({"utilities": [[_cell(bps=("0", "2", "2"), slopes=("1", "1", "1"))]]})


def test_validate_rejects_negative_base_by_default():
    raw = {"utilities": [[_cell(base="-1")]]}
    with pytest.raises(ValidationError, match="nonnegative"):
        validate_instance(raw)
    assert validate_instance(raw, require_nonnegative_base=False).n == 1


def test_validate_accepts_chained_table():
    def c(b, s):
        return _cell(base=b, slopes=(s,))
    a, b, d = c("8", "8"), c("2", "3/2"), c("1", "1")
    inst = validate_instance({"n": 3, "utilities": [[a, b, d], [d, a, b], [b, d, a]]})
    assert inst == chained_instance()


def test_structured_instance_gets_exponents():
    inst = RentInstance(((PiecewiseLinearUtility(5, (0, 1), (F(9, 4), F(2, 3))),),), F(1, 2))
    assert inst.utilities[0][0].exponents == (2, -1)


@given(utilities(), st.fractions(min_value=-20, max_value=40, max_denominator=9),
       st.fractions(min_value=F(1, 9), max_value=10, max_denominator=9))
def test_evaluate_strictly_decreasing(u, x, dx):
    assert evaluate(u, x) > evaluate(u, x + dx)


@given(utilities(), st.fractions(min_value=-20, max_value=40, max_denominator=9))
def test_evaluate_matches_reference(u, x):
    assert evaluate(u, x) == reference_value(u, x)


@given(utilities())
def test_evaluate_continuous_at_breakpoints(u):
    for i, b in enumerate(u.breakpoints[1:], start=1):
        left = u.value_at_breakpoints()[i - 1] - u.slopes[i - 1] * (b - u.breakpoints[i - 1])
        assert left == evaluate(u, b)


@given(utilities())
def test_zero_crossing_is_root(u):
    assert evaluate(u, zero_crossing(u)) == 0


@settings(max_examples=50)
@given(st.integers(0, 10_000), st.lists(st.fractions(min_value=-5, max_value=25, max_denominator=4), min_size=3, max_size=3))
def test_linear_domain_contains_prices_and_no_breakpoint(seed, prices):
    inst = random_instance(3, 3, seed)
    d = linear_domain(inst, prices)
    assert d.contains(prices)
    for r in range(3):
        assert not any(d.lower[r] < b < d.upper[r] for b in inst.room_breakpoints(r))


@settings(max_examples=50)
@given(st.integers(0, 10_000), st.permutations([0, 1, 2]),
       st.lists(st.fractions(min_value=0, max_value=15, max_denominator=4), min_size=3, max_size=3))
def test_ef_implies_eps_ef(seed, perm, prices):
    inst = random_instance(3, 2, seed)
    s = Solution(tuple(perm), tuple(prices))
    if check_ef(inst, s).ok:
        for eps in (F(1, 100), F(1, 2), F(3)):
            assert check_eps_ef(inst, s, eps).ok
