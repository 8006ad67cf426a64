import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kneser_density.action import induce_ksets, is_intersecting_set, restrict_to_orbit
from kneser_density.pgl import build_pgl2, build_psl2
from kneser_density.search import (BITSET_LIMIT, GraphTooLargeError, GraphView, compatibility_graph,
                                   degeneracy_order, max_clique, max_intersecting_set)


def test_triangle_and_empty():
    Gv = GraphView.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    res = max_clique(Gv)
    assert res.size == 3 and res.certificate == [0, 1, 2] and res.optimal and res.proof == "search"
    assert max_clique(GraphView.from_edges(0, [])).size == 0
    assert max_clique(GraphView.from_edges(3, [])).size == 1


def test_degeneracy_order_is_permutation():
    Gv = GraphView.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
    assert sorted(degeneracy_order(Gv.adj)) == list(range(5))


@st.composite
def random_graphs(draw):
    n = draw(st.integers(1, 22))
    p = draw(st.floats(0.1, 0.9))
    seed = draw(st.integers(0, 10**6))
    return nx.gnp_random_graph(n, p, seed=seed)


@settings(max_examples=60, deadline=None)
@given(random_graphs(), st.integers(0, 5))
def test_matches_networkx(g, seed):
    want = max(len(c) for c in nx.find_cliques(g))
    res = max_clique(GraphView.from_edges(g.number_of_nodes(), g.edges()), seed=seed)
    assert res.size == want
    assert all(g.has_edge(a, b) for i, a in enumerate(res.certificate) for b in res.certificate[i + 1:])


def test_initial_and_upper_bound():
    g = nx.complete_graph(6)
    Gv = GraphView.from_edges(6, g.edges())
    res = max_clique(Gv, upper_bound=6)
    assert res.size == 6 and res.proof == "bound"
    with pytest.raises(ValueError):
        max_clique(GraphView.from_edges(3, [(0, 1)]), initial=[0, 2])


@pytest.mark.parametrize("make,k", [(lambda: build_pgl2(4), 3), (lambda: build_psl2(7), 3),
                                    (lambda: build_pgl2(5), 3), (lambda: build_psl2(4), 2),
                                    (lambda: build_psl2(7), 2)])
def test_reductions_agree(make, k):
    A = induce_ksets(make(), k)
    sizes = set()
    for red in ("none", "identity", "classes"):
        res = max_intersecting_set(A, reduction=red, time_limit=None)
        assert res.optimal and is_intersecting_set(res.certificate, A)
        sizes.add(res.size)
    assert len(sizes) == 1


def test_known_optima():
    assert max_intersecting_set(induce_ksets(build_pgl2(8), 3)).size == 8
    assert max_intersecting_set(induce_ksets(build_pgl2(9), 3)).size == 18
    assert max_intersecting_set(restrict_to_orbit(induce_ksets(build_psl2(9), 3), 0)).size == 15


def test_thread_invariance():
    A = induce_ksets(build_pgl2(9), 3)
    one = max_intersecting_set(A, threads=1)
    two = max_intersecting_set(A, threads=2)
    assert one.size == two.size == 18 and two.optimal


def test_initial_set_translated_and_checked():
    G = build_pgl2(8)
    A = induce_ksets(G, 3)
    res = max_intersecting_set(A)
    shifted = sorted(int(x) for x in G.right_products(np.array(res.certificate), 5))
    again = max_intersecting_set(A, initial=shifted, upper_bound=8)
    assert again.size == 8 and again.proof == "bound" and 0 in again.certificate
    der = int(np.flatnonzero(A.derangements.flags)[0])
    with pytest.raises(ValueError):
        max_intersecting_set(A, initial=[0, der])
    with pytest.raises(ValueError):
        max_intersecting_set(A, reduction="bogus")


def test_timeout_flag():
    A = induce_ksets(build_pgl2(16), 3)
    res = max_intersecting_set(A, time_limit=0.0)
    assert not res.optimal and res.proof == "timeout"
    assert is_intersecting_set(res.certificate, A)


def test_graph_too_large():
    A = induce_ksets(build_pgl2(4), 3)
    with pytest.raises(GraphTooLargeError):
        compatibility_graph(A, np.zeros(BITSET_LIMIT + 1, dtype=np.int64))
