import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from rentdiv import io as jio
from rentdiv.errors import InvalidProfile, ValidationError
from rentdiv.generators import random_instance, random_linear_instance
from rentdiv.model import Solution
from rentdiv.reductions import LinearInstance, build_game, ef_to_candidate
from rentdiv.solver import solve


def test_q_formats():
    assert jio.q(F(3, 4)) == "3/4"
    assert jio.q(5) == "5"
    assert jio.q(math.inf) == "inf" and jio.q(-math.inf) == "-inf"


def test_floats_rejected():
    with pytest.raises(ValidationError, match="float"):
        jio.loads('{"base": 1.5}')


def test_bad_json():
    with pytest.raises(ValidationError, match="invalid JSON"):
        jio.loads("{")


@settings(max_examples=25)
@given(st.integers(0, 10**6), st.integers(1, 4), st.sampled_from([None, F(1, 2), F(1)]))
def test_instance_round_trip(seed, n, eps):
    inst = random_instance(n, 3, seed, epsilon=eps)
    text = jio.dumps(jio.instance_to_json(inst))
    assert jio.instance_from_json(jio.loads(text)) == inst
    assert jio.dumps(jio.instance_to_json(jio.instance_from_json(jio.loads(text)))) == text


def test_solution_round_trip():
    s = Solution((1, 0, 2), (F(7, 3), 0, F(-1, 2)))
    raw = jio.loads(jio.dumps(jio.solution_to_json(s, {"ok": True})))
    assert raw["certificate"] == {"ok": True}
    assert jio.solution_from_json(raw, 3) == s


@pytest.mark.parametrize("raw", [
    [],
    {"prices": ["0"]},
    {"allocation": [0, 0], "prices": ["0", "0"]},
    {"allocation": ["0"], "prices": ["0"]},
    {"allocation": [0], "prices": ["0"]},
])
def test_solution_rejects(raw):
    with pytest.raises(ValidationError):
        jio.solution_from_json(raw, 2)


def test_game_and_profile_round_trip():
    lin = LinearInstance.from_rent_instance(random_linear_instance(3, 4))
    g = build_game(lin)
    assert jio.game_from_json(jio.loads(jio.dumps(jio.game_to_json(g)))) == g
    s, _ = solve(lin.to_rent_instance())
    prof = ef_to_candidate(g, s, lin)
    assert jio.profile_from_json(jio.loads(jio.dumps(jio.profile_to_json(prof)))) == prof


def test_game_shape_checked():
    raw = jio.game_to_json(build_game(LinearInstance.from_rent_instance(random_linear_instance(2, 1))))
    raw["P"] = raw["P"][:-1]
    with pytest.raises(ValidationError):
        jio.game_from_json(raw)


def test_profile_rejects():
    with pytest.raises(ValidationError):
        jio.profile_from_json({"x": []})
    with pytest.raises(InvalidProfile):
        jio.profile_from_json({"strategies": [["1/2", "1/3"]]})
