import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from rentdiv.errors import NoPerfectMatching
from rentdiv.generators import random_instance
from rentdiv.matching import (
    EXPONENT,
    PRODUCT,
    RATIONAL,
    WeightedBipartiteGraph,
    first_choice_graph,
    max_weight_perfect_matching,
)
from rentdiv.model import RentInstance, Solution, check_ef


def brute_force(g):
    """Best weight over all permutations using only listed edges, and the lexicographically first optimum."""
    best, arg = None, None
    for perm in itertools.permutations(range(g.n)):
        if all((a, r) in g.weights for a, r in enumerate(perm)):
            w = g.weight_of(perm)
            if best is None or w > best:
                best, arg = w, perm
    return best, arg


def test_product_weights_pick_identity():
    slopes = [[8, F(3, 2), 1], [1, 8, F(3, 2)], [F(3, 2), 1, 8]]
    g = WeightedBipartiteGraph.complete(slopes, PRODUCT)
    assert max_weight_perfect_matching(g) == (0, 1, 2)
    assert g.weight_of((0, 1, 2)) == 512
    assert g.weight_of((2, 0, 1)) == 1
    assert g.weight_of((1, 2, 0)) == F(27, 8)


def test_single_edge():
    g = WeightedBipartiteGraph(1, {(0, 0): 5}, EXPONENT)
    assert max_weight_perfect_matching(g) == (0,)


def test_no_perfect_matching():
    g = WeightedBipartiteGraph(2, {(0, 0): 1, (1, 0): 1}, RATIONAL)
    with pytest.raises(NoPerfectMatching):
        max_weight_perfect_matching(g)
    with pytest.raises(NoPerfectMatching):
        max_weight_perfect_matching(WeightedBipartiteGraph(2, {(0, 0): 1, (1, 0): 1}, PRODUCT))


def test_ties_go_to_lexicographically_smallest():
    g = WeightedBipartiteGraph.complete([[1, 1, 1]] * 3, EXPONENT)
    assert max_weight_perfect_matching(g) == (0, 1, 2)
    g = WeightedBipartiteGraph(3, {(0, 1): 0, (0, 2): 0, (1, 0): 0, (1, 2): 0, (2, 0): 0, (2, 1): 0}, EXPONENT)
    assert max_weight_perfect_matching(g) == (1, 2, 0)


def test_exponent_n5_matches_enumeration():
    rng = random.Random(20)
    for _ in range(20):
        table = [[rng.randint(-4, 4) for _ in range(5)] for _ in range(5)]
        g = WeightedBipartiteGraph.complete(table, EXPONENT)
        best, arg = brute_force(g)
        got = max_weight_perfect_matching(g)
        assert g.weight_of(got) == best and got == arg


@settings(max_examples=150)
@given(st.integers(1, 6), st.sampled_from([RATIONAL, EXPONENT, PRODUCT]), st.integers(0, 10**6),
       st.floats(0.3, 1.0))
def test_matches_exhaustive_on_sparse_graphs(n, kind, seed, density):
    rng = random.Random(seed)
    weights = {}
    for a in range(n):
        for r in range(n):
            if rng.random() < density:
                if kind == PRODUCT:
                    weights[(a, r)] = F(rng.randint(1, 6), rng.randint(1, 3))
                elif kind == EXPONENT:
                    weights[(a, r)] = rng.randint(-3, 3)
                else:
                    weights[(a, r)] = F(rng.randint(-9, 9), rng.randint(1, 3))
    g = WeightedBipartiteGraph(n, weights, kind)
    best, arg = brute_force(g)
    if best is None:
        with pytest.raises(NoPerfectMatching):
            max_weight_perfect_matching(g)
    else:
        got = max_weight_perfect_matching(g)
        assert got == arg
        assert max_weight_perfect_matching(g) == got


def test_first_choice_at_zero_prices(chained):
    g = first_choice_graph(chained, (0, 0, 0))
    assert g.edges == {(0, 0), (1, 1), (2, 2)}
    assert g.kind == PRODUCT


def test_first_choice_identical_agents_tied():
    inst = RentInstance.quasilinear([[4, 2], [4, 2]])
    g = first_choice_graph(inst, (2, 0))
    assert g.edges == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_first_choice_structured_uses_exponents():
    inst = random_instance(3, 3, 4, epsilon=F(1, 2))
    g = first_choice_graph(inst, (1, 2, 3))
    assert g.kind == EXPONENT
    for (a, r), k in g.weights.items():
        assert (1 + F(1, 2)) ** k == inst.utilities[a][r].slope_left_of((1, 2, 3)[r])


@settings(max_examples=60)
@given(st.integers(0, 10**6), st.lists(st.fractions(min_value=-3, max_value=12, max_denominator=3), min_size=3, max_size=3))
def test_first_choice_edges_are_argmax(seed, prices):
    inst = random_instance(3, 3, seed)
    g = first_choice_graph(inst, prices)
    for a in range(3):
        vals = [inst.value(a, r, prices[r]) for r in range(3)]
        assert set(g.neighbours(a)) == {r for r in range(3) if vals[r] == max(vals)}
    # an allocation is envy-free at these prices iff it is a perfect matching of the graph
    for perm in itertools.permutations(range(3)):
        inside = all((a, r) in g.weights for a, r in enumerate(perm))
        assert inside == check_ef(inst, Solution(perm, prices)).ok
