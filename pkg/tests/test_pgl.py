import itertools
import math

import numpy as np
import pytest

from kneser_density.gf import field_of_order
from kneser_density.pgl import (NotApplicableError, ProjMatrix, build_named_subgroup, build_pgammal2, build_pgl2,
                                build_psl2, build_psl_sigma, proj_line, triple_sign)


@pytest.mark.parametrize("q", [4, 5, 7, 8, 9, 11, 13, 16])
def test_orders(q):
    assert build_pgl2(q).order == (q - 1) * q * (q + 1)
    assert build_psl2(q).order == (q - 1) * q * (q + 1) // math.gcd(2, q - 1)
    assert build_psl2(q).is_subgroup_of(build_pgl2(q))


def test_even_q_psl_equals_pgl():
    assert np.array_equal(build_psl2(8).table, build_pgl2(8).table)


def test_psl_sigma():
    G = build_psl_sigma(9)
    assert G.order == 720
    assert build_psl2(9).is_subgroup_of(G)
    assert not G.is_subgroup_of(build_pgl2(9))  # it contains field automorphisms
    with pytest.raises(NotApplicableError):
        build_psl_sigma(27)
    with pytest.raises(NotApplicableError):
        build_psl_sigma(16)


def test_pgammal():
    assert build_pgammal2(8).order == 1512
    assert build_pgammal2(4).order == 120


def test_rejects_small_or_non_prime_power():
    with pytest.raises(ValueError):
        build_pgl2(6)
    with pytest.raises(ValueError):
        build_pgl2(3)


def test_matrix_action_matches_definition():
    L = proj_line(7)
    m = (2, 3, 1, 4)
    perm = L.matrix_perm(m)
    F = L.spec
    for idx, (u1, u2) in enumerate(L.points):
        a, b, c, d = (F.from_int(v) for v in m)
        x, y = F.from_int(u1), F.from_int(u2)
        v1, v2 = a * x + b * y, c * x + d * y
        img = L.normalize(int(v1), int(v2))
        assert perm(idx) == img
    with pytest.raises(ValueError):
        L.matrix_perm((1, 2, 2, 4))


def test_projmatrix_wrapper():
    F = field_of_order(5)
    M = ProjMatrix(F(1), F(1), F(0), F(1))
    assert M.perm() in build_psl2(5)
    with pytest.raises(ValueError):
        ProjMatrix(F(1), F(2), F(2), F(4))


@pytest.mark.parametrize("kind,q,order", [
    ("unipotent", 8, 8), ("unipotent_c3", 4, 12), ("unipotent_c3", 16, 48), ("unipotent_pm", 9, 18),
    ("a4", 7, 12), ("a4", 9, 12), ("a5", 11, 60), ("a5", 9, 60), ("a5", 31, 60)])
def test_named_subgroups(kind, q, order):
    H = build_named_subgroup(kind, q)
    assert H.order == order
    assert H.is_subgroup_of(build_pgl2(q))


def test_named_subgroup_conditions():
    with pytest.raises(NotApplicableError):
        build_named_subgroup("unipotent_c3", 8)
    with pytest.raises(NotApplicableError):
        build_named_subgroup("unipotent_pm", 27)
    with pytest.raises(NotApplicableError):
        build_named_subgroup("a5", 7)
    with pytest.raises(NotApplicableError):
        build_named_subgroup("a4", 8)
    with pytest.raises(ValueError):
        build_named_subgroup("nope", 8)


@pytest.mark.parametrize("q", [5, 9, 13, 7])
def test_triple_sign_invariance(q):
    """On ordered triples: PSL preserves the sign, PGL elements outside PSL flip it."""
    psl, pgl = build_psl2(q), build_pgl2(q)
    L = proj_line(q)
    triples = list(itertools.combinations(range(q + 1), 3))[:40]
    outside = [i for i in range(pgl.order) if pgl.table[i].tobytes() not in psl._index][:5]
    for t in triples:
        s = triple_sign(L.spec, *t)
        for g in psl.generators:
            assert triple_sign(q, *(g(v) for v in t)) == s
        for i in outside:
            img = tuple(int(pgl.table[i][v]) for v in t)
            assert triple_sign(q, *img) != s


@pytest.mark.parametrize("q", [5, 9, 13, 7, 11])
def test_triple_sign_order_independent_iff_q_1_mod_4(q):
    swapped = [triple_sign(q, 0, 1, 2) == triple_sign(q, 1, 0, 2),
               triple_sign(q, 0, 2, 3) == triple_sign(q, 0, 3, 2)]
    assert all(swapped) == (q % 4 == 1)
    assert not any(swapped) == (q % 4 == 3)


def test_triple_sign_errors():
    with pytest.raises(ValueError):
        triple_sign(8, 0, 1, 2)
    with pytest.raises(ValueError):
        triple_sign(9, 0, 0, 2)
    # homogeneous pairs are accepted
    assert triple_sign(5, (1, 0), (1, 1), (0, 1)) in ("square", "nonsquare")
