from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from kneser_density.action import induce_ksets
from kneser_density.bounds import (BoundError, BoundResult, _variable_rows, clique_lp_bound, coclique_bound,
                                   lp_max_certified, lp_max_vertex_enumeration, ratio_bound, weight_search)
from kneser_density.pgl import build_pgl2, build_psl2
from kneser_density.scheme import dense_cayley_spectrum, eigen_table


def setup(G, k=3):
    A = induce_ksets(G, k)
    ET = eigen_table(G)
    der = A.derangements.derangement_classes()
    fixing = [c for c in range(1, len(G.classes)) if c not in der]
    return A, ET, der, fixing


@pytest.mark.parametrize("q,ratio,lp", [(8, Fraction(72, 7), 8), (9, 126, 18), (16, Fraction(272, 5), 48)])
def test_pgl_bounds(q, ratio, lp):
    G = build_pgl2(q)
    A, ET, der, fixing = setup(G)
    assert ratio_bound(ET, der, None, G.order).value == ratio
    res = clique_lp_bound(ET, fixing)
    assert res.exact and res.value == lp
    best, allres = coclique_bound(ET, der, G.order, methods=("ratio", "lp", "weighted"))
    assert best.floor == min(r.floor for r in allres)


def test_unit_ratio_matches_dense_spectrum():
    for G in (build_pgl2(5), build_psl2(7), build_pgl2(7)):
        A, ET, der, _ = setup(G)
        ev = dense_cayley_spectrum(G, der)
        d, tau = ev.max(), ev.min()
        classical = G.order / (1 - d / tau)
        assert float(ratio_bound(ET, der, None, G.order).value) == pytest.approx(classical, rel=1e-9)


def test_twosets_ratio():
    G = build_psl2(4)
    A, ET, der, _ = setup(G, 2)
    assert ratio_bound(ET, der, None, G.order).value == 12


def test_weighted_psl27():
    G = build_psl2(27)
    A, ET, der, _ = setup(G)
    assert ratio_bound(ET, der, None, G.order).value == Fraction(378, 13)
    assert weight_search(ET, der, G.order).value == 27


def test_q16_binding_rows():
    q = 16
    G = build_pgl2(q)
    A, ET, der, fixing = setup(G)
    res = clique_lp_bound(ET, fixing)
    keys, table, sizes = _variable_rows(ET, res.variables)
    assert sorted(sizes) == [q * q - 1, q * (q + 1)]
    ix = sizes.index(q * q - 1)
    iy = 1 - ix
    assert res.optimizer[keys[ix]] == Fraction(1, q + 1)
    assert res.optimizer[keys[iy]] == Fraction(2, q + 1)
    pairs = {(table[r][ix], table[r][iy]) for r in res.binding_rows}
    assert pairs == {(q - 1, -q), (-(q + 1), 0)}


def test_bound_errors():
    G = build_pgl2(5)
    A, ET, der, fixing = setup(G)
    with pytest.raises(BoundError):
        ratio_bound(ET, der, {der[0]: 0}, G.order)
    with pytest.raises(ValueError):
        ratio_bound(ET, der, {der[0]: -1}, G.order)
    with pytest.raises(ValueError):
        ratio_bound(ET, der, {fixing[0]: 1}, G.order)
    # complete graph: all non-identity classes
    best, _ = coclique_bound(ET, list(range(1, len(G.classes))), G.order)
    assert best.value == 1 and best.kind == "trivial"
    best, _ = coclique_bound(ET, [], G.order)
    assert best.value == G.order


def test_unbounded_lp_is_rejected():
    # max x s.t. x >= 0
    with pytest.raises(BoundError):
        lp_max_vertex_enumeration([Fraction(1)], [[Fraction(1)]], [Fraction(0)])


def test_floor_and_dict():
    r = BoundResult("ratio", Fraction(72, 7), True)
    assert r.floor == 10 and r.to_dict()["value"] == "72/7"
    f = BoundResult("ratio", 7.9999999999999, False)
    assert f.floor == 8


rat = st.integers(-5, 5).map(Fraction)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.data())
def test_exact_lp_matches_scipy(n, data):
    m = data.draw(st.integers(n, 6))
    rows = [[data.draw(rat) for _ in range(n)] for _ in range(m)]
    rhs = [data.draw(st.integers(-5, 0).map(Fraction)) for _ in range(m)]
    # box keeps it bounded and gives full rank
    for j in range(n):
        for sgn in (1, -1):
            rows.append([Fraction(sgn * (i == j)) for i in range(n)])
            rhs.append(Fraction(-10))
    c = [data.draw(rat) for _ in range(n)]
    A = np.array(rows, dtype=float)
    b = np.array(rhs, dtype=float)
    ref = linprog(-np.array(c, dtype=float), A_ub=-A, b_ub=-b, bounds=[(None, None)] * n, method="highs")
    assert ref.status == 0  # x = 0 is feasible
    sol = lp_max_vertex_enumeration(c, rows, rhs)
    assert float(sol.value) == pytest.approx(-ref.fun, abs=1e-7)
    cert = lp_max_certified(c, rows, rhs)
    assert float(cert.value) == pytest.approx(-ref.fun, abs=1e-7)
